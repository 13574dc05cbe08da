//! Grid specifications of the form `a=0.5:3:6,b=0.5:3:6,t=0:1:11`.
//!
//! Each axis is `name=start:stop:count` with `count` inclusive linspace
//! points; all three axes `a`, `b`, `t` must be present exactly once.

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: Vec<f64>,
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect()
}

fn parse_axis(part: &str) -> Result<(&str, Vec<f64>), CliError> {
    let bad = || {
        CliError::Input(format!(
            "bad grid axis \"{part}\", expected name=start:stop:count"
        ))
    };
    let (name, range) = part.split_once('=').ok_or_else(bad)?;
    let fields: Vec<&str> = range.split(':').collect();
    if fields.len() != 3 {
        return Err(bad());
    }
    let start: f64 = fields[0].parse().map_err(|_| bad())?;
    let stop: f64 = fields[1].parse().map_err(|_| bad())?;
    let count: usize = fields[2].parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(CliError::Input(format!("grid axis \"{name}\" is empty")));
    }
    if !(start.is_finite() && stop.is_finite() && start <= stop) {
        return Err(CliError::Input(format!(
            "grid axis \"{name}\" needs finite start <= stop (got {start}:{stop})"
        )));
    }
    Ok((name, linspace(start, stop, count)))
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut a = None;
        let mut b = None;
        let mut t = None;
        for part in text.split(',') {
            let (name, points) = parse_axis(part.trim())?;
            let slot = match name {
                "a" => &mut a,
                "b" => &mut b,
                "t" => &mut t,
                other => {
                    return Err(CliError::Input(format!(
                        "unknown grid axis \"{other}\" (expected a, b, t)"
                    )))
                }
            };
            if slot.replace(points).is_some() {
                return Err(CliError::Input(format!("grid axis \"{name}\" given twice")));
            }
        }
        match (a, b, t) {
            (Some(a), Some(b), Some(t)) => Ok(GridSpec { a, b, t }),
            _ => Err(CliError::Input(
                "grid must specify all of a, b, t".to_string(),
            )),
        }
    }

    /// All `(a, b, t)` points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.a.iter().flat_map(move |&a| {
            self.b
                .iter()
                .flat_map(move |&b| self.t.iter().map(move |&t| (a, b, t)))
        })
    }
}
