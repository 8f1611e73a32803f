//! Front-end plumbing: the t-spec parser, versioned CSV/JSON table
//! serialization, and the self-test battery of cross-implementation checks.

use crate::counterexample::{orlicz_lower_bound, BlockParameter, GrowthRow, OctaveRow};
use crate::cylinder::CylinderFunction;
use crate::error::WalshError;
use crate::index::FrequencyIndex;
use crate::kernels::{conjugate_dirichlet, conjugate_partial_sum};
use crate::lebesgue::{
    lebesgue_bruteforce, lebesgue_exact, lebesgue_plain, toledo_scan, BoundReport,
};
use crate::martingale::{
    conjugate_truncation, conjugate_truncation_telescoped, fejer_decomposition, YoungFunction,
};
use crate::param::{Beta0Convention, ConjugateParameter};
use crate::scalar::{format_rat, Rat, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Parse a t-spec: `0`, `P/Q` (rational in [0,1)), or
/// `bits:BITS` / `bits:BITS(BITS)` with an optional repeating tail.
pub fn parse_t(spec: &str) -> Result<ConjugateParameter, WalshError> {
    let s = spec.trim();
    if s == "0" {
        return Ok(ConjugateParameter::zero());
    }
    if let Some(rest) = s.strip_prefix("bits:") {
        let (pre, per) = match rest.find('(') {
            Some(open) => {
                if !rest.ends_with(')') || open + 2 > rest.len() {
                    return Err(WalshError::ParseT(format!("unbalanced period in {spec:?}")));
                }
                (&rest[..open], &rest[open + 1..rest.len() - 1])
            }
            None => (rest, ""),
        };
        if pre.is_empty() && per.is_empty() {
            return Err(WalshError::ParseT(format!("no bits in {spec:?}")));
        }
        let digits = |part: &str| -> Result<Vec<u8>, WalshError> {
            part.chars()
                .map(|ch| match ch {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(WalshError::ParseT(format!("bad bit {ch:?} in {spec:?}"))),
                })
                .collect()
        };
        return Ok(ConjugateParameter::from_bits(digits(pre)?, digits(per)?));
    }
    if let Some((p, q)) = s.split_once('/') {
        let parse = |part: &str| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| WalshError::ParseT(format!("bad integer {part:?} in {spec:?}")))
        };
        return ConjugateParameter::from_rational(parse(p)?, parse(q)?);
    }
    Err(WalshError::ParseT(format!("unrecognized t-spec {spec:?}")))
}

/// Floats serialize with 12 significant digits, deterministically.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.11e}")
}

/// A named table of string cells; the common shape behind every report.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn csv_escape(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

impl Table {
    pub fn new(name: &'static str, columns: Vec<&'static str>) -> Self {
        Self { name, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema=1 table={}\n", self.name);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let value = json!({
            "schema": 1,
            "table": self.name,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&value).expect("string tables serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

fn rat_num_den(r: &Rat) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

/// Bound-scan rows.
pub fn scan_table(reports: &[BoundReport]) -> Table {
    let mut table = Table::new(
        "scan",
        vec![
            "n", "N", "t_bits", "m", "V_n", "V_m", "T_nm", "T_mn", "L_num", "L_den",
            "upper_margin", "lower_margin_C1", "lower_margin_C2", "mtk_ok", "sws_ok",
        ],
    );
    for r in reports {
        let (l_num, l_den) = rat_num_den(&r.lebesgue);
        table.push(vec![
            r.n.to_string(),
            r.level.to_string(),
            r.t_digest.clone(),
            r.m.to_string(),
            r.v_n.to_string(),
            r.v_m.to_string(),
            r.t_nm.to_string(),
            r.t_mn.to_string(),
            l_num,
            l_den,
            format_rat(&r.upper_margin),
            format_rat(&r.lower_margin_c1),
            format_rat(&r.lower_margin_c2),
            r.mtk_ok.to_string(),
            r.sws_ok.to_string(),
        ]);
    }
    table
}

/// Growth-run rows, including the two Orlicz lower bounds per row.
pub fn growth_table(rows: &[GrowthRow], pattern: &BlockParameter) -> Table {
    let q1 = YoungFunction::llogl();
    let q2 = YoungFunction::sqrt_log();
    let mut table = Table::new(
        "counterexample",
        vec!["A", "n", "depth", "yA", "kernel_l1_num_or_float", "llogl_fA", "orlicz_lb_Q1", "orlicz_lb_Q2"],
    );
    for r in rows {
        let bound = |q: &YoungFunction| match orlicz_lower_bound(r.a, pattern, q) {
            Ok(b) => format_f64(b),
            Err(_) => "n/a".into(),
        };
        table.push(vec![
            r.a.to_string(),
            r.n.to_string(),
            r.depth.to_string(),
            format_f64(r.y),
            format_rat(&r.kernel_l1),
            format_f64(r.llogl),
            bound(&q1),
            bound(&q2),
        ]);
    }
    table
}

/// Per-octave kernel-norm maxima.
pub fn sweep_table(rows: &[OctaveRow]) -> Table {
    let mut table = Table::new("fejer-norms", vec!["N", "argmax_n", "max_norm", "max_norm_float"]);
    for r in rows {
        table.push(vec![
            r.exponent.to_string(),
            r.argmax_n.to_string(),
            format_rat(&r.max_norm),
            format_f64(Scalar::to_f64(&r.max_norm)),
        ]);
    }
    table
}

/// Pointwise kernel dump.  Exact values render as `num/den`, floats with
/// 12 significant digits.
pub fn kernel_table<S: Scalar>(kernel: &CylinderFunction<S>) -> Table {
    let mut table = Table::new("kernel", vec!["c", "value"]);
    for (c, v) in kernel.values().iter().enumerate() {
        let rendered = match v.to_rat() {
            Some(r) => format_rat(&r),
            None => format_f64(v.to_f64()),
        };
        table.push(vec![c.to_string(), rendered]);
    }
    table
}

/// Outcome of one self-test check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Cross-implementation oracle battery; deterministic and quick.
pub fn selftest() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let third = ConjugateParameter::from_rational(1, 3).unwrap();
    let five16 = ConjugateParameter::from_rational(5, 16).unwrap();

    // 1: closed formula vs direct integration of the kernel.
    {
        let mut bad = 0usize;
        for nv in 1..=256u64 {
            let n = FrequencyIndex::new(nv).unwrap();
            for t in [&ConjugateParameter::zero(), &third, &five16] {
                if lebesgue_exact(n, t).total != lebesgue_bruteforce(n, t).unwrap() {
                    bad += 1;
                }
            }
        }
        out.push(CheckResult {
            name: "lebesgue-closed-vs-integration",
            pass: bad == 0,
            detail: format!("768 pairs; {bad} mismatches"),
        });
    }

    // 2: general formula collapses to the plain one at t = 0.
    {
        let zero = ConjugateParameter::zero();
        let bad = (1..1024u64)
            .filter(|&nv| {
                let n = FrequencyIndex::new(nv).unwrap();
                lebesgue_exact(n, &zero).total != lebesgue_plain(n)
            })
            .count();
        out.push(CheckResult {
            name: "plain-formula-at-zero",
            pass: bad == 0,
            detail: format!("1023 orders; {bad} mismatches"),
        });
    }

    // 3: spectral conjugate partial sums vs kernel convolution.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut bad = 0usize;
        for _ in 0..8 {
            let vals: Vec<i64> = (0..128).map(|_| rng.gen_range(-4..=4)).collect();
            let f: CylinderFunction<Rat> = CylinderFunction::from_ints(7, &vals).unwrap();
            let bits: Vec<u8> = (0..9).map(|_| rng.gen_range(0..=1)).collect();
            let t = ConjugateParameter::from_bits(bits, Vec::new());
            for n in [1u64, 3, 17, 64] {
                let a = conjugate_partial_sum(&f, n, &t, Beta0Convention::KernelPlus).unwrap();
                let k: CylinderFunction<Rat> = conjugate_dirichlet(n, &t, 7).unwrap();
                let b = crate::cylinder::dyadic_convolve(&f, &k).unwrap();
                if a != b {
                    bad += 1;
                }
            }
        }
        out.push(CheckResult {
            name: "partial-sum-vs-convolution",
            pass: bad == 0,
            detail: format!("32 cases; {bad} mismatches"),
        });
    }

    // 4: the two truncation routes agree.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut bad = 0usize;
        for _ in 0..8 {
            let vals: Vec<i64> = (0..64).map(|_| rng.gen_range(-4..=4)).collect();
            let f: CylinderFunction<Rat> = CylinderFunction::from_ints(6, &vals).unwrap();
            let bits: Vec<u8> = (0..8).map(|_| rng.gen_range(0..=1)).collect();
            let t = ConjugateParameter::from_bits(bits, Vec::new());
            for m in 0..=7 {
                if conjugate_truncation(&f, m, &t).unwrap()
                    != conjugate_truncation_telescoped(&f, m, &t).unwrap()
                {
                    bad += 1;
                }
            }
        }
        out.push(CheckResult {
            name: "truncation-telescoping",
            pass: bad == 0,
            detail: format!("64 cases; {bad} mismatches"),
        });
    }

    // 5: six-term split reassembles the conjugate mean.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut bad = 0usize;
        for _ in 0..4 {
            let vals: Vec<i64> = (0..64).map(|_| rng.gen_range(-4..=4)).collect();
            let f: CylinderFunction<Rat> = CylinderFunction::from_ints(6, &vals).unwrap();
            let bits: Vec<u8> = (0..8).map(|_| rng.gen_range(0..=1)).collect();
            let t = ConjugateParameter::from_bits(bits, Vec::new());
            for n in [2u64, 5, 23, 64] {
                let parts = fejer_decomposition(&f, n, &t).unwrap();
                let sum = parts
                    .iter()
                    .fold(CylinderFunction::zero(6).unwrap(), |acc, p| acc.add(p).unwrap());
                let direct =
                    crate::kernels::conjugate_fejer_mean(&f, n, &t, Beta0Convention::Literal)
                        .unwrap();
                if sum != direct {
                    bad += 1;
                }
            }
        }
        out.push(CheckResult {
            name: "fejer-decomposition-sum",
            pass: bad == 0,
            detail: format!("16 cases; {bad} mismatches"),
        });
    }

    // 6: Fejér kernel norm supremum.
    {
        let (max, arg) = toledo_scan(512);
        let pass = max <= Rat::new(17.into(), 15.into());
        out.push(CheckResult {
            name: "fejer-norm-supremum",
            pass,
            detail: format!("max {} at n={arg}; cap 17/15", format_rat(&max)),
        });
    }

    // 7: weighted transition sums dominate a third of the variation.
    {
        let bad = (1..1u64 << 12)
            .filter(|&nv| {
                let n = FrequencyIndex::new(nv).unwrap();
                let s = n.weighted_sum_s();
                s * Rat::new(3.into(), 1.into()) < Rat::new(n.variation().into(), 1.into())
            })
            .count();
        out.push(CheckResult {
            name: "weighted-sum-lower-bound",
            pass: bad == 0,
            detail: format!("4095 orders; {bad} violations"),
        });
    }

    out
}

/// Render self-test outcomes.
pub fn selftest_table(results: &[CheckResult]) -> Table {
    let mut table = Table::new("selftest", vec!["check", "status", "detail"]);
    for r in results {
        table.push(vec![
            r.name.to_string(),
            if r.pass { "ok" } else { "FAIL" }.to_string(),
            r.detail.clone(),
        ]);
    }
    table
}
