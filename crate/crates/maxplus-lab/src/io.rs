//! Text formats: grid functions, 2-D grid functions and trajectory
//! dumps. Finite values round-trip bit-exactly (shortest-representation
//! printing), bottom is the token `-inf`.
//!
//! Grid function:
//! ```text
//! grid <xmin> <xmax> <n> <periodic>
//! <v0> <v1> … <v{n−1}>
//! ```
//!
//! Trajectory: repeated records, each one a `t <time>` line followed by
//! a grid function.
//!
//! 2-D grid function:
//! ```text
//! grid2 <xmin> <xmax> <nx> <ymin> <ymax> <ny> <periodic>
//! <row-major values, nx per line>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::conservation::Trajectory;
use crate::error::{Error, Result};
use crate::scalar::MaxScalar;
use crate::space::{Grid, Grid2, GridFunction, GridFunction2};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn format_grid_function(f: &GridFunction) -> String {
    let g = f.grid();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "grid {:?} {:?} {} {}",
        g.xmin(),
        g.xmax(),
        g.len(),
        g.periodic()
    );
    let parts: Vec<String> = f.values().iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "{}", parts.join(" "));
    out
}

/// Parses one grid function starting at `lines[*cursor]`, advancing the
/// cursor past the values. Line numbers in errors are 1-based.
fn parse_grid_function_at(lines: &[&str], cursor: &mut usize) -> Result<GridFunction> {
    let header_idx = *cursor;
    let header = lines
        .get(header_idx)
        .ok_or_else(|| parse_err(header_idx + 1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "grid" {
        return Err(parse_err(
            header_idx + 1,
            "expected `grid xmin xmax n periodic`",
        ));
    }
    let xmin: f64 = toks[1]
        .parse()
        .map_err(|_| parse_err(header_idx + 1, "bad xmin"))?;
    let xmax: f64 = toks[2]
        .parse()
        .map_err(|_| parse_err(header_idx + 1, "bad xmax"))?;
    let n: usize = toks[3]
        .parse()
        .map_err(|_| parse_err(header_idx + 1, "bad cell count"))?;
    let periodic: bool = toks[4]
        .parse()
        .map_err(|_| parse_err(header_idx + 1, "bad periodic flag"))?;
    let grid = Grid::new(xmin, xmax, n, periodic)?;

    let mut values = Vec::with_capacity(n);
    *cursor += 1;
    while values.len() < n {
        let idx = *cursor;
        let line = lines
            .get(idx)
            .ok_or_else(|| parse_err(idx + 1, format!("expected {n} values, found {}", values.len())))?;
        for tok in line.split_whitespace() {
            if values.len() == n {
                return Err(parse_err(idx + 1, format!("more than {n} values")));
            }
            let v: MaxScalar = tok
                .parse()
                .map_err(|_| parse_err(idx + 1, format!("unparseable token `{tok}`")))?;
            values.push(v);
        }
        *cursor += 1;
    }
    GridFunction::new(grid, values)
}

pub fn parse_grid_function(text: &str) -> Result<GridFunction> {
    let lines: Vec<&str> = text.lines().collect();
    let mut cursor = 0;
    while cursor < lines.len() && lines[cursor].trim().is_empty() {
        cursor += 1;
    }
    let f = parse_grid_function_at(&lines, &mut cursor)?;
    for (extra, line) in lines.iter().enumerate().skip(cursor) {
        if !line.trim().is_empty() {
            return Err(parse_err(extra + 1, "trailing content after values"));
        }
    }
    Ok(f)
}

pub fn write_grid_function(path: impl AsRef<Path>, f: &GridFunction) -> Result<()> {
    std::fs::write(path, format_grid_function(f))?;
    Ok(())
}

pub fn read_grid_function(path: impl AsRef<Path>) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path)?;
    parse_grid_function(&text)
}

pub fn format_trajectory(traj: &Trajectory) -> String {
    let mut out = String::new();
    for (k, state) in traj.states.iter().enumerate() {
        let _ = writeln!(out, "t {:?}", traj.time(k));
        out.push_str(&format_grid_function(state));
    }
    out
}

pub fn parse_trajectory(text: &str) -> Result<Trajectory> {
    let lines: Vec<&str> = text.lines().collect();
    let mut cursor = 0;
    let mut times = Vec::new();
    let mut states = Vec::new();
    while cursor < lines.len() {
        if lines[cursor].trim().is_empty() {
            cursor += 1;
            continue;
        }
        let toks: Vec<&str> = lines[cursor].split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "t" {
            return Err(parse_err(cursor + 1, "expected `t <time>`"));
        }
        let t: f64 = toks[1]
            .parse()
            .map_err(|_| parse_err(cursor + 1, "bad time"))?;
        cursor += 1;
        let f = parse_grid_function_at(&lines, &mut cursor)?;
        times.push(t);
        states.push(f);
    }
    if states.is_empty() {
        return Err(parse_err(1, "empty trajectory"));
    }
    let dt = if times.len() >= 2 { times[1] - times[0] } else { 0.0 };
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * (1.0 + dt.abs()) {
            return Err(parse_err(
                k + 1,
                "trajectory records must be uniformly spaced in time",
            ));
        }
    }
    Ok(Trajectory { t0: times[0], dt, states })
}

pub fn write_trajectory(path: impl AsRef<Path>, traj: &Trajectory) -> Result<()> {
    std::fs::write(path, format_trajectory(traj))?;
    Ok(())
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    parse_trajectory(&std::fs::read_to_string(path)?)
}

pub fn format_grid_function_2d(f: &GridFunction2) -> String {
    let g = f.grid();
    let (gx, gy) = (g.x(), g.y());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "grid2 {:?} {:?} {} {:?} {:?} {} {}",
        gx.xmin(),
        gx.xmax(),
        gx.len(),
        gy.xmin(),
        gy.xmax(),
        gy.len(),
        gx.periodic()
    );
    for j in 0..gy.len() {
        let row: Vec<String> = (0..gx.len()).map(|i| f.get(i, j).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_grid_function_2d(text: &str) -> Result<GridFunction2> {
    let mut lines = text.lines().enumerate();
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| parse_err(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 8 || toks[0] != "grid2" {
        return Err(parse_err(
            hline + 1,
            "expected `grid2 xmin xmax nx ymin ymax ny periodic`",
        ));
    }
    let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| parse_err(hline + 1, "bad number")) };
    let nx: usize = toks[3].parse().map_err(|_| parse_err(hline + 1, "bad nx"))?;
    let ny: usize = toks[6].parse().map_err(|_| parse_err(hline + 1, "bad ny"))?;
    let periodic: bool = toks[7]
        .parse()
        .map_err(|_| parse_err(hline + 1, "bad periodic flag"))?;
    let gx = Grid::new(num(toks[1])?, num(toks[2])?, nx, periodic)?;
    let gy = Grid::new(num(toks[4])?, num(toks[5])?, ny, periodic)?;
    let grid = Grid2::new(gx, gy);
    let mut values = Vec::with_capacity(nx * ny);
    for (idx, line) in lines {
        for tok in line.split_whitespace() {
            if values.len() == nx * ny {
                return Err(parse_err(idx + 1, "too many values"));
            }
            values.push(
                tok.parse::<MaxScalar>()
                    .map_err(|_| parse_err(idx + 1, format!("unparseable token `{tok}`")))?,
            );
        }
    }
    if values.len() != nx * ny {
        return Err(parse_err(
            0,
            format!("expected {} values, found {}", nx * ny, values.len()),
        ));
    }
    GridFunction2::new(grid, values)
}
