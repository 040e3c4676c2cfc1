//! Plain-text channel matrix dump: one row per UE→RU link, columns
//! `j k i r` followed by interleaved real/imaginary parts of the vector.

use std::io::{BufRead, Write};

use super::{ChannelSet, Scenario, N_OPERATORS};
use crate::error::{Error, Result};
use crate::linalg::{CVec, C64};

const MAGIC: &str = "# cran-pool channel dump v1";

pub fn write_channel_dump<W: Write>(channels: &ChannelSet, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    for op in 0..N_OPERATORS {
        let subset: Vec<String> = channels.subset(op).iter().map(|r| r.to_string()).collect();
        writeln!(out, "subset {op} {}", subset.join(" "))?;
    }
    for (j, per_op) in channels.links().iter().enumerate() {
        for (k, per_ue) in per_op.iter().enumerate() {
            for (i, per_cp) in per_ue.iter().enumerate() {
                for (r, v) in per_cp.iter().enumerate() {
                    write!(out, "{j} {k} {i} {r}")?;
                    for z in v.iter() {
                        write!(out, " {} {}", z.re, z.im)?;
                    }
                    writeln!(out)?;
                }
            }
        }
    }
    Ok(())
}

/// Reads a dump written by [`write_channel_dump`]; dimensions are checked
/// against `scenario`.
pub fn read_channel_dump<R: BufRead>(input: R, scenario: &Scenario) -> Result<ChannelSet> {
    let bad = |m: String| Error::Dump(m);
    let mut h: Vec<Vec<Vec<Vec<Option<CVec>>>>> = (0..N_OPERATORS)
        .map(|j| {
            (0..scenario.n_ues[j]).map(|_| (0..N_OPERATORS).map(|i| vec![None; scenario.n_rus[i]]).collect()).collect()
        })
        .collect();
    let mut subset = [Vec::new(), Vec::new()];
    let mut saw_magic = false;
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            saw_magic |= line == MAGIC;
            continue;
        }
        let mut fields = line.split_whitespace();
        if line.starts_with("subset") {
            fields.next();
            let op: usize = parse(fields.next(), lineno)?;
            if op >= N_OPERATORS {
                return Err(bad(format!("line {}: operator {op} out of range", lineno + 1)));
            }
            subset[op] = fields.map(|f| parse(Some(f), lineno)).collect::<Result<_>>()?;
            continue;
        }
        let j: usize = parse(fields.next(), lineno)?;
        let k: usize = parse(fields.next(), lineno)?;
        let i: usize = parse(fields.next(), lineno)?;
        let r: usize = parse(fields.next(), lineno)?;
        let values: Vec<f64> = fields.map(|f| parse(Some(f), lineno)).collect::<Result<_>>()?;
        let slot = h
            .get_mut(j)
            .and_then(|x| x.get_mut(k))
            .and_then(|x| x.get_mut(i))
            .and_then(|x| x.get_mut(r))
            .ok_or_else(|| bad(format!("line {}: link ({j},{k})->({i},{r}) outside the scenario", lineno + 1)))?;
        let n = scenario.n_antennas[i][r];
        if values.len() != 2 * n {
            return Err(bad(format!("line {}: expected {} columns, got {}", lineno + 1, 2 * n, values.len())));
        }
        *slot = Some(CVec::from_fn(n, |a, _| C64::new(values[2 * a], values[2 * a + 1])));
    }
    if !saw_magic {
        return Err(bad("missing header line".into()));
    }
    let h = h
        .into_iter()
        .map(|per_op| {
            per_op
                .into_iter()
                .map(|per_ue| {
                    per_ue
                        .into_iter()
                        .map(|per_cp| per_cp.into_iter().collect::<Option<Vec<_>>>())
                        .collect::<Option<Vec<_>>>()
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("dump does not cover every link".into()))?;
    ChannelSet::from_links(scenario, h, subset).map_err(|e| bad(e.to_string()))
}

fn parse<T: std::str::FromStr>(field: Option<&str>, lineno: usize) -> Result<T> {
    field.and_then(|f| f.parse().ok()).ok_or_else(|| Error::Dump(format!("line {}: malformed field", lineno + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_channels, generate_scenario_geometry};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_is_exact(seed in any::<u64>(), n_ru in 0usize..3, n_ue in 0usize..3, ant in 1usize..3, s in 0usize..3) {
            let s = s.min(n_ru);
            let sc = Scenario::symmetric(n_ru, n_ue, ant, 1.0, 1.0, 1.0, 0.0, 0.0, s);
            let p = generate_scenario_geometry(&sc, seed);
            let set = generate_channels(&sc, &p, seed);
            let mut buf = Vec::new();
            write_channel_dump(&set, &mut buf).unwrap();
            let back = read_channel_dump(buf.as_slice(), &sc).unwrap();
            prop_assert_eq!(back, set);
        }
    }

    #[test]
    fn missing_link_is_an_error() {
        let sc = Scenario::symmetric(1, 1, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 0);
        let text = format!("{MAGIC}\n0 0 0 0 1 0\n");
        assert!(matches!(read_channel_dump(text.as_bytes(), &sc), Err(Error::Dump(_))));
    }

    #[test]
    fn wrong_width_is_an_error() {
        let sc = Scenario::symmetric(1, 1, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 0);
        let text = format!("{MAGIC}\n0 0 0 0 1 0 2\n");
        assert!(read_channel_dump(text.as_bytes(), &sc).is_err());
    }
}
