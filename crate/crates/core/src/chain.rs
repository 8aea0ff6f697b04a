//! Recorded chain output and the generic chain driver.

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::dist::RandomStream;
use crate::error::{Error, Result};
use crate::kernels::TransitionKernel;

/// Writes a state as a flat row of reals.
pub trait Flatten {
    fn flatten_into(&self, out: &mut Vec<f64>);

    fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::new();
        self.flatten_into(&mut v);
        v
    }
}

impl Flatten for f64 {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }
}

impl Flatten for usize {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.push(*self as f64);
    }
}

impl Flatten for bool {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.push(if *self { 1.0 } else { 0.0 });
    }
}

impl<T: Flatten> Flatten for Vec<T> {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        for v in self {
            v.flatten_into(out);
        }
    }
}

impl Flatten for DVector<f64> {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.as_slice());
    }
}

/// Column-major, matching `vec`.
impl Flatten for DMatrix<f64> {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.as_slice());
    }
}

impl<A: Flatten, B: Flatten> Flatten for (A, B) {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        self.0.flatten_into(out);
        self.1.flatten_into(out);
    }
}

/// Sampled states stored by column, with per-row acceptance flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainOutput {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    iterations: Vec<usize>,
    accepted: Vec<bool>,
    pub seed: u64,
    pub kernel: String,
    pub duration: Duration,
    /// Number of conditional `X | Y` draws made while producing the output.
    pub conditional_draws: usize,
}

impl ChainOutput {
    pub fn new(names: Vec<String>, seed: u64, kernel: impl Into<String>) -> Self {
        Self {
            columns: vec![Vec::new(); names.len()],
            names,
            iterations: Vec::new(),
            accepted: Vec::new(),
            seed,
            kernel: kernel.into(),
            duration: Duration::ZERO,
            conditional_draws: 0,
        }
    }

    /// Default column names `prefix1..prefixd`.
    pub fn numbered(prefix: &str, d: usize) -> Vec<String> {
        (1..=d).map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn push_row(&mut self, iteration: usize, row: &[f64], accepted: bool) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::domain(format!(
                "row has {} values but the chain has {} columns",
                row.len(),
                self.names.len()
            )));
        }
        for (c, v) in self.columns.iter_mut().zip(row) {
            c.push(*v);
        }
        self.iterations.push(iteration);
        self.accepted.push(accepted);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|j| self.column(j))
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }

    pub fn accepted_flags(&self) -> &[bool] {
        &self.accepted
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.accepted_count() as f64 / self.len() as f64
        }
    }

    /// `h(Z_i)` for every recorded row.
    pub fn map_rows(&self, h: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let mut buf = vec![0.0; self.dim()];
        (0..self.len())
            .map(|i| {
                for (b, c) in buf.iter_mut().zip(&self.columns) {
                    *b = c[i];
                }
                h(&buf)
            })
            .collect()
    }

    fn select(&self, keep: impl Fn(usize) -> bool) -> ChainOutput {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        ChainOutput {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect(),
            iterations: idx.iter().map(|&i| self.iterations[i]).collect(),
            accepted: idx.iter().map(|&i| self.accepted[i]).collect(),
            seed: self.seed,
            kernel: self.kernel.clone(),
            duration: self.duration,
            conditional_draws: self.conditional_draws,
        }
    }

    /// Rows `0, t, 2t, …`: `⌈n/t⌉` of them.
    pub fn thin(&self, t: usize) -> Result<ChainOutput> {
        if t == 0 {
            return Err(Error::domain("thin must be at least 1"));
        }
        Ok(self.select(|i| i % t == 0))
    }

    /// Drop the first `burn_in` rows.
    pub fn discard(&self, burn_in: usize) -> ChainOutput {
        self.select(|i| i >= burn_in)
    }

    /// Keep the last `k` rows.
    pub fn tail(&self, k: usize) -> ChainOutput {
        let start = self.len().saturating_sub(k);
        self.select(|i| i >= start)
    }

    /// Add `by` to every recorded iteration number.
    pub fn offset_iterations(&mut self, by: usize) {
        for it in &mut self.iterations {
            *it += by;
        }
    }

    /// Same iterations and acceptance flags with each row passed through `map`.
    pub fn map_states(&self, names: Vec<String>, map: impl Fn(&[f64]) -> Vec<f64>) -> Result<ChainOutput> {
        let mut out = ChainOutput::new(names, self.seed, self.kernel.clone());
        for i in 0..self.len() {
            out.push_row(self.iterations[i], &map(&self.row(i)), self.accepted[i])?;
        }
        out.duration = self.duration;
        out.conditional_draws = self.conditional_draws;
        Ok(out)
    }

    /// CSV with header `iter,<names>,accepted`; reals use 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::from("iter");
        for n in &self.names {
            line.push(',');
            line.push_str(n);
        }
        line.push_str(",accepted\n");
        w.write_all(line.as_bytes())?;
        for i in 0..self.len() {
            line.clear();
            line.push_str(&self.iterations[i].to_string());
            for c in &self.columns {
                line.push(',');
                line.push_str(&format_real(c[i]));
            }
            line.push_str(if self.accepted[i] { ",1\n" } else { ",0\n" });
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Run `n` steps of `kernel` from `init`, recording the state after each.
pub fn run_chain<K>(
    kernel: &K,
    init: K::State,
    n: usize,
    names: Vec<String>,
    rng: &mut RandomStream,
) -> Result<ChainOutput>
where
    K: TransitionKernel,
    K::State: Flatten,
{
    if n == 0 {
        return Err(Error::domain("chain length must be at least 1"));
    }
    let start = Instant::now();
    let mut out = ChainOutput::new(names, rng.seed(), kernel.info().to_string());
    let mut state = init;
    let mut row = Vec::new();
    for i in 1..=n {
        let accepted = kernel.step(&mut state, rng)?;
        row.clear();
        state.flatten_into(&mut row);
        out.push_row(i, &row, accepted)?;
    }
    out.duration = start.elapsed();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{FnTarget, Proposal, RandomWalkMh};

    fn toy(n: usize) -> ChainOutput {
        let mut c = ChainOutput::new(vec!["a".into(), "b".into()], 3, "toy");
        for i in 0..n {
            c.push_row(i + 1, &[i as f64, -(i as f64)], i % 2 == 0).unwrap();
        }
        c
    }

    #[test]
    fn thin_keeps_ceiling_rows() {
        let c = toy(10);
        assert_eq!(c.thin(3).unwrap().len(), 4);
        assert_eq!(c.thin(1).unwrap(), c);
        assert_eq!(c.thin(10).unwrap().len(), 1);
        assert!(c.thin(0).is_err());
        assert_eq!(c.thin(3).unwrap().iterations(), &[1, 4, 7, 10]);
    }

    #[test]
    fn csv_layout() {
        let c = toy(2);
        let s = c.to_csv_string();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "iter,a,b,accepted");
        assert_eq!(lines[1], "1,0.0000000000000000e0,-0.0000000000000000e0,1");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567, f64::MIN_POSITIVE] {
            let s = format_real(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn row_length_is_checked() {
        let mut c = ChainOutput::new(vec!["a".into()], 0, "x");
        assert!(c.push_row(1, &[1.0, 2.0], true).is_err());
    }

    #[test]
    fn run_chain_records_n_rows_and_acceptance() {
        let k = RandomWalkMh::new(FnTarget::new(1, |x: &[f64]| -0.5 * x[0] * x[0]), 1.0, Proposal::Uniform).unwrap();
        let mut rng = RandomStream::new(9);
        let c = run_chain(&k, vec![0.0], 1, vec!["x".into()], &mut rng).unwrap();
        assert_eq!(c.len(), 1);
        let c = run_chain(&k, vec![0.0], 500, vec!["x".into()], &mut rng).unwrap();
        assert_eq!(c.len(), 500);
        assert!(c.accepted_count() <= 500);
        assert!(run_chain(&k, vec![0.0], 0, vec!["x".into()], &mut rng).is_err());
    }
}
