//! The `compute` subcommand.

use rug::Float;
use serde::Serialize;
use taubound::arith::format_truncated;
use taubound::bounds::{
    eta2, eta3, inequality_margin, lambda_of, nicolas_robin_ratio, r1, r_of, t_of, upsilon, Inequality,
    InequalityConstants,
};
use taubound::{Factorization, PrimeTable};

use crate::usage;

pub const FUNCTIONS: [&str; 12] =
    ["tau", "omega", "log", "lambda", "t", "r", "upsilon", "r1", "eta2", "eta3", "nicolas-robin", "margin"];

#[derive(Debug, Serialize)]
pub struct Computed {
    pub function: String,
    pub args: Vec<String>,
    /// Decimal value; real values end in the truncation marker `…`.
    pub value: String,
    pub exact: bool,
    pub digits: u32,
}

fn arity(name: &str, args: &[String], n: usize) -> anyhow::Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(usage(format!("{name} takes {n} argument(s), got {}", args.len())))
    }
}

/// `log:<decimal>` is read as log z; anything else as a factorization of z.
fn log_z(table: &PrimeTable, arg: &str) -> anyhow::Result<Float> {
    match arg.strip_prefix("log:") {
        Some(v) => Ok(table.ctx().parse(v)?),
        None => Ok(Factorization::parse(table, arg)?.log_n().clone()),
    }
}

pub fn evaluate(table: &PrimeTable, name: &str, args: &[String]) -> anyhow::Result<Computed> {
    let digits = table.ctx().digits();
    let real = |x: Float| (format_truncated(&x, digits as usize), false);
    let factor = |i: usize| Factorization::parse(table, &args[i]);
    let (value, exact) = match name {
        "tau" => {
            arity(name, args, 1)?;
            (factor(0)?.tau().to_string(), true)
        }
        "omega" => {
            arity(name, args, 1)?;
            (factor(0)?.omega().to_string(), true)
        }
        "log" => {
            arity(name, args, 1)?;
            real(factor(0)?.log_n().clone())
        }
        "lambda" => {
            arity(name, args, 1)?;
            real(lambda_of(&factor(0)?)?)
        }
        "t" => {
            arity(name, args, 1)?;
            real(t_of(&factor(0)?)?)
        }
        "r" => {
            arity(name, args, 1)?;
            real(r_of(&factor(0)?)?)
        }
        "nicolas-robin" => {
            arity(name, args, 1)?;
            real(nicolas_robin_ratio(&factor(0)?)?)
        }
        "upsilon" => {
            arity(name, args, 2)?;
            real(upsilon(&factor(0)?, &log_z(table, &args[1])?)?)
        }
        "r1" => {
            arity(name, args, 2)?;
            let k: usize = args[1].parse().map_err(|_| usage(format!("bad k {:?}", args[1])))?;
            real(r1(table, &log_z(table, &args[0])?, k)?)
        }
        "eta2" => {
            arity(name, args, 0)?;
            real(eta2(table.prec()))
        }
        "eta3" => {
            arity(name, args, 0)?;
            real(eta3(table)?)
        }
        "margin" => {
            arity(name, args, 2)?;
            let ineq = Inequality::parse(&args[0])?;
            let consts = InequalityConstants::new(table)?;
            real(inequality_margin(ineq, &factor(1)?, &consts)?)
        }
        _ => return Err(usage(format!("unknown function {name:?}; expected one of {}", FUNCTIONS.join(", ")))),
    };
    Ok(Computed { function: name.to_string(), args: args.to_vec(), value, exact, digits })
}
