//! Tables 1 to 10 as rows of cells, recomputed or taken from the reference values.

use std::fmt::Write;

use crate::arith::PrimeTable;
use crate::error::{Error, Result};

use super::reference::{
    TABLE1, TABLE10, TABLE2, TABLE3, TABLE4, TABLE5, TABLE5_K, TABLE6, TABLE7, TABLE8, TABLE9, TABLE_TOL,
};
use super::thm2::table1;
use super::thm4::{Survivors, Thm4Search};
use super::thm5::{eliminate, IntervalBounds, Setup, SCANNED_J_MAX};

pub const TABLE_IDS: std::ops::RangeInclusive<u8> = 1..=10;

/// Last interval covered by Tables 9 and 10.
const REDUCED_J_MAX: u32 = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct TableData {
    pub id: u8,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// How recomputed cells are compared to reference cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Exact,
    /// The value is an upper bound: ours <= reference + tolerance.
    Upper,
    /// The value is a lower bound: ours >= reference − tolerance.
    Lower,
}

pub fn side(id: u8) -> Side {
    match id {
        6 | 8 | 10 => Side::Upper,
        7 => Side::Lower,
        _ => Side::Exact,
    }
}

/// Tables 6 to 10 run the interval pipeline and need the long-running flag.
pub fn needs_long_running(id: u8) -> bool {
    id >= 6
}

fn check_id(id: u8) -> Result<()> {
    if TABLE_IDS.contains(&id) {
        Ok(())
    } else {
        Err(Error::domain("table", format!("table {id} outside 1..=10")))
    }
}

fn strs<T: ToString>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn row_table(id: u8, label: &str, pairs: &[(usize, usize)]) -> TableData {
    let mut header = vec!["k".to_string()];
    header.extend(strs(pairs.iter().map(|p| p.0)));
    let mut row = vec![label.to_string()];
    row.extend(strs(pairs.iter().map(|p| p.1)));
    TableData { id, header, rows: vec![row] }
}

fn survivor_table(id: u8, s: &Survivors) -> TableData {
    let rows = s
        .iter()
        .filter(|(_, js)| !js.is_empty())
        .map(|(k, js)| strs([*k, *js.iter().min().expect("nonempty"), *js.iter().max().expect("nonempty")]))
        .collect();
    TableData { id, header: strs(["k", "j1_min", "j1_max"]), rows }
}

fn triple_table(id: u8, rows: &[(usize, usize, usize)]) -> TableData {
    TableData { id, header: strs(["k", "j1_min", "j1_max"]), rows: rows.iter().map(|r| strs([r.0, r.1, r.2])).collect() }
}

fn value_table(id: u8, name: &str, values: impl IntoIterator<Item = (u32, f64)>, decimals: usize) -> TableData {
    let rows = values.into_iter().map(|(j, v)| vec![j.to_string(), format!("{v:.decimals$}")]).collect();
    TableData { id, header: strs(["j", name]), rows }
}

fn table5_data(rows: &[(u32, Vec<usize>)]) -> TableData {
    let mut header = vec!["alpha".to_string()];
    header.extend(strs(TABLE5_K));
    let rows = rows
        .iter()
        .map(|(a, caps)| {
            let mut r = vec![a.to_string()];
            r.extend(strs(caps.iter()));
            r
        })
        .collect();
    TableData { id: 5, header, rows }
}

fn column(id: u8) -> &'static str {
    match id {
        6 => "w",
        7 => "varpi_lower",
        8 => "delta_prime",
        _ => "delta_reduced",
    }
}

/// The published table.
pub fn published_table(id: u8) -> Result<TableData> {
    check_id(id)?;
    let listed = |t: &[f64; 39]| t.iter().enumerate().map(|(i, &v)| (i as u32 + 1, v)).collect::<Vec<_>>();
    Ok(match id {
        1 => row_table(1, "u_k", &TABLE1),
        2 => row_table(2, "u_k", &TABLE2),
        3 => triple_table(3, &TABLE3),
        4 => triple_table(4, &TABLE4),
        5 => table5_data(&TABLE5.iter().map(|(a, c)| (*a, c.to_vec())).collect::<Vec<_>>()),
        6 => value_table(6, column(6), listed(&TABLE6), 4),
        7 => value_table(7, column(7), listed(&TABLE7), 4),
        8 => value_table(8, column(8), listed(&TABLE8), 5),
        9 => TableData {
            id: 9,
            header: strs(["j", "m_min", "m_max"]),
            rows: (1..=REDUCED_J_MAX)
                .map(|j| {
                    let r = TABLE9.iter().find(|r| r.0 <= j && j <= r.1).expect("j covered");
                    strs([j as usize, r.2, r.3])
                })
                .collect(),
        },
        _ => value_table(10, column(10), TABLE10.iter().enumerate().map(|(i, &v)| (i as u32 + 1, v)), 5),
    })
}

/// Recomputes a table from scratch.
pub fn compute_table(table: &PrimeTable, id: u8) -> Result<TableData> {
    check_id(id)?;
    match id {
        1 => Ok(row_table(1, "u_k", &table1(table)?)),
        2..=5 => {
            let s = Thm4Search::new(table)?;
            Ok(match id {
                2 => row_table(2, "u_k", &s.table2()?),
                3 => survivor_table(3, &s.stage_survivors(1, &s.stage1_input()?)?),
                4 => {
                    let t3 = s.stage_survivors(1, &s.stage1_input()?)?;
                    survivor_table(4, &s.stage_survivors(2, &t3)?)
                }
                _ => table5_data(&s.table5()),
            })
        }
        _ => {
            let setup = Setup::new(table)?;
            let j_max = if id >= 9 { REDUCED_J_MAX } else { SCANNED_J_MAX };
            let bounds: Vec<IntervalBounds> =
                (1..=j_max).map(|j| IntervalBounds::compute(&setup, j)).collect::<Result<_>>()?;
            Ok(match id {
                6 => value_table(6, column(6), bounds.iter().map(|b| (b.j, b.w.to_f64())), 4),
                7 => value_table(7, column(7), bounds.iter().map(|b| (b.j, b.varpi.to_f64())), 6),
                8 => value_table(8, column(8), bounds.iter().map(|b| (b.j, b.delta_prime.to_f64())), 6),
                9 => TableData {
                    id: 9,
                    header: strs(["j", "m_min", "m_max"]),
                    rows: bounds
                        .iter()
                        .map(|b| {
                            let (lo, hi) = b.m_range.map_or(("-".into(), "-".into()), |r| (r.0.to_string(), r.1.to_string()));
                            vec![b.j.to_string(), lo, hi]
                        })
                        .collect(),
                },
                _ => {
                    let mut t = TableData { id: 10, header: strs(["j", column(10), "max_upsilon"]), rows: Vec::new() };
                    for b in &bounds {
                        let (worst, _) = eliminate(&setup, b)?;
                        t.rows.push(vec![
                            b.j.to_string(),
                            format!("{:.6}", b.delta_reduced().to_f64()),
                            format!("{:.10}", worst.value.to_f64()),
                        ]);
                    }
                    t
                }
            })
        }
    }
}

impl TableData {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header.join(",")).expect("string write");
        for r in &self.rows {
            writeln!(out, "{}", r.join(",")).expect("string write");
        }
        out
    }

    pub fn from_csv(id: u8, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?.split(',').map(String::from).collect();
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Ok(TableData { id, header, rows })
    }

    /// Differences from `reference`, matched by column name and row order.
    pub fn compare(&self, reference: &TableData) -> Vec<String> {
        let mut diffs = Vec::new();
        if self.rows.len() != reference.rows.len() {
            diffs.push(format!("{} rows vs {} in the reference", self.rows.len(), reference.rows.len()));
        }
        let sd = side(self.id);
        for (ci, name) in reference.header.iter().enumerate() {
            let Some(mine) = self.header.iter().position(|h| h == name) else {
                diffs.push(format!("missing column {name}"));
                continue;
            };
            for (ri, (a, b)) in self.rows.iter().zip(&reference.rows).enumerate() {
                let (x, y) = (&a[mine], &b[ci]);
                let ok = match (x.parse::<f64>(), y.parse::<f64>(), ci) {
                    (Ok(u), Ok(v), c) if c > 0 && (x.contains('.') || y.contains('.')) => match sd {
                        Side::Upper => u <= v + TABLE_TOL,
                        Side::Lower => u >= v - TABLE_TOL,
                        Side::Exact => (u - v).abs() <= TABLE_TOL,
                    },
                    _ => x == y,
                };
                if !ok {
                    diffs.push(format!("row {} column {name}: {x} vs {y}", ri + 1));
                }
            }
        }
        diffs
    }
}
