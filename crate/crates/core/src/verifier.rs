//! Orchestration: named checks with provenance-tagged expectations, report
//! assembly, and the `verify-all` suite binding every module together.
//!
//! Expectations come either from closed formulas or from independent oracles;
//! no check consumes another check's output as ground truth.

use num_complex::Complex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{
    chi_block_matrix, chi_inverse, chi_matrix, ch_relations_hold_exact, ch_relations_residual,
    g_matrix, is_identity, m_matrix, tensor_contract, Basis,
};
use crate::config::{LoopKind, LoopSpec, RunConfig, Tolerances};
use crate::contour::{
    closed_form_degree_one, derivative_check, euler_check, phi_at_root_with_branch,
    psi_at_root, BranchRecord, QuadratureConfig, SolutionTable,
};
use crate::error::{Error, Result};
use crate::exact::QuadRat;
use crate::fan::{Fan, LatticePoint};
use crate::gamma::{choose_basepoint, verify_duality, GammaContext, Truncation};
use crate::monodromy::{verify_pairing_invariance, ParameterPath};
use crate::pairing::{matrix_spread, pairing_matrix, solution_family};
use crate::poly::{find_roots, nearest_root, ParameterPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C64 = Complex<f64>;
type Rat = num_rational::BigRational;

pub const PROV_PAPER: &str = "closed-form";
pub const PROV_DERIVED: &str = "derived-oracle";
pub const PROV_TRIVIAL: &str = "trivial";

/// One named check with its computed and expected values.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: String,
    pub computed: Value,
    pub expected: Value,
    pub provenance: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn from_deviation(
        name: impl Into<String>,
        inputs: impl Into<String>,
        computed: Value,
        expected: Value,
        provenance: &str,
        deviation: f64,
        tolerance: f64,
    ) -> Self {
        CheckRecord {
            name: name.into(),
            inputs: inputs.into(),
            computed,
            expected,
            provenance: provenance.to_string(),
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        }
    }

    /// Exact (zero-tolerance) identity check.
    pub fn exact(
        name: impl Into<String>,
        inputs: impl Into<String>,
        holds: bool,
        provenance: &str,
    ) -> Self {
        CheckRecord {
            name: name.into(),
            inputs: inputs.into(),
            computed: json!(holds),
            expected: json!(true),
            provenance: provenance.to_string(),
            deviation: if holds { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config_digest: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config_digest: String, seed: u64, checks: Vec<CheckRecord>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let summary = Summary { total: checks.len(), passed, failed: checks.len() - passed };
        Report { config_digest, seed, checks, summary }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text rendering; failing checks print both values.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        out.push_str(&format!("config {}  seed {}\n", self.config_digest, self.seed));
        for c in &self.checks {
            out.push_str(&format!(
                "{}  {:width$}  deviation {:>12.5e}  tol {:>9.1e}  [{}]\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.deviation,
                c.tolerance,
                c.provenance,
                width = width
            ));
            if !c.pass {
                out.push_str(&format!("      computed: {}\n", c.computed));
                out.push_str(&format!("      expected: {}\n", c.expected));
            }
        }
        out.push_str(&format!(
            "{}/{} checks passed\n",
            self.summary.passed, self.summary.total
        ));
        out
    }
}

fn c_json(v: C64) -> Value {
    json!([v.re, v.im])
}

fn matrix_json(m: &[Vec<C64>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|v| c_json(*v)).collect())).collect())
}

fn rat_matrix_json(m: &[Vec<Rat>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(|v| json!(v.to_string())).collect()))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// exact checks
// ---------------------------------------------------------------------------

/// `M · G = 1` in exact rational arithmetic.
pub fn check_mg_inverse(fan: &Fan) -> CheckRecord {
    let basis = Basis::new(fan.clone());
    let m = m_matrix::<Rat>(&basis);
    let g = g_matrix::<Rat>(&basis);
    let r = basis.r();
    let mut holds = true;
    for i in 0..r {
        for j in 0..r {
            let mut acc = Rat::new(0.into(), 1.into());
            for k in 0..r {
                acc += &m[i][k] * &g[k][j];
            }
            let expect = if i == j { Rat::new(1.into(), 1.into()) } else { Rat::new(0.into(), 1.into()) };
            holds &= acc == expect;
        }
    }
    let mut rec = CheckRecord::exact(
        "mg-exact-inverse",
        format!("fan n={} rays={:?}", fan.n(), fan.rays()),
        holds,
        PROV_PAPER,
    );
    rec.computed = json!({ "m": rat_matrix_json(&m), "g": rat_matrix_json(&g), "identity": holds });
    rec
}

/// The basis matrix of `χ_H` equals its block form and `χ_H⁻¹` inverts it,
/// both in exact arithmetic over `ℚ(√5)`.
pub fn check_chi_consistency(fan: &Fan) -> Result<Vec<CheckRecord>> {
    let basis = Basis::new(fan.clone());
    let inputs = format!("fan n={} rays={:?}", fan.n(), fan.rays());
    let computed = chi_matrix::<QuadRat>(&basis)?;
    let block = chi_block_matrix::<QuadRat>(&basis)?;
    let inv = chi_inverse::<QuadRat>(&basis)?;
    let block_match = computed == block;
    let identity = is_identity(&tensor_contract(&inv, &computed));
    Ok(vec![
        CheckRecord::exact("chi-matrix-block-form", inputs.clone(), block_match, PROV_PAPER),
        CheckRecord::exact("chi-inverse-exact", inputs, identity, PROV_PAPER),
    ])
}

/// All `K_0` presentation relations vanish under the Chern character.
pub fn check_ch_relations(fan: &Fan, tol: &Tolerances) -> Vec<CheckRecord> {
    let basis = Basis::new(fan.clone());
    let inputs = format!("fan n={} rays={:?}", fan.n(), fan.rays());
    let exact = ch_relations_hold_exact(&basis);
    let residual = ch_relations_residual::<f64>(&basis);
    vec![
        CheckRecord::exact("ch-relations-exact", inputs.clone(), exact, PROV_DERIVED),
        CheckRecord::from_deviation(
            "ch-relations-complex",
            inputs,
            json!(residual),
            json!(0.0),
            PROV_DERIVED,
            residual,
            tol.ch_relations,
        ),
    ]
}

// ---------------------------------------------------------------------------
// pairing checks
// ---------------------------------------------------------------------------

fn x_digest(x: &ParameterPoint<f64>) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for v in &x.x {
        for b in v.re.to_le_bytes().iter().chain(v.im.to_le_bytes().iter()) {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("x#{h:016x}")
}

/// The matrix `P`: `⟨Φ^{γ_k},Ψ^{γ_l}⟩ = nδ_{kl} - 1`, `⟨Φ⁰,Ψ^{λ₀}⟩ = n/2πi`,
/// `⟨Φ⁰,Ψ^{γ_l}⟩ = 0`, rank `n`.
pub fn check_pairing_matrix(
    x: &ParameterPoint<f64>,
    qcfg: &QuadratureConfig<f64>,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    let n = x.n();
    let inputs = x_digest(x);
    let roots = find_roots(x)?;
    let (phis, psis) = solution_family(x, &roots, 2, qcfg)?;
    let pm = pairing_matrix(&phis, &psis, x, tol.rank)?;

    let mut dev_block = 0.0f64;
    for k in 1..=n {
        for l in 1..=n {
            let expect = if k == l { n as f64 - 1.0 } else { -1.0 };
            dev_block = dev_block.max((pm.entries[k][l] - C64::new(expect, 0.0)).norm());
        }
    }
    let line_expect = C64::new(0.0, -(n as f64) / std::f64::consts::TAU);
    let dev_line = (pm.entries[0][0] - line_expect).norm();
    let dev_zero =
        (1..=n).map(|l| pm.entries[0][l].norm()).fold(0.0, f64::max);

    Ok(vec![
        CheckRecord::from_deviation(
            "pairing-root-block",
            inputs.clone(),
            matrix_json(&pm.entries),
            json!(format!("n δ_kl - 1 with n = {n}")),
            PROV_PAPER,
            dev_block,
            tol.pairing,
        ),
        CheckRecord::from_deviation(
            "pairing-line-entry",
            inputs.clone(),
            c_json(pm.entries[0][0]),
            c_json(line_expect),
            PROV_PAPER,
            dev_line,
            tol.pairing,
        ),
        CheckRecord::from_deviation(
            "pairing-top-zeros",
            inputs.clone(),
            Value::Array((1..=n).map(|l| c_json(pm.entries[0][l])).collect()),
            json!(0.0),
            PROV_PAPER,
            dev_zero,
            tol.pairing_zero,
        ),
        CheckRecord::from_deviation(
            "pairing-rank",
            inputs,
            json!({ "rank": pm.rank, "singular_values": pm.singular_values }),
            json!(n),
            PROV_PAPER,
            (pm.rank as f64 - n as f64).abs(),
            0.5,
        ),
    ])
}

/// A seeded smooth discriminant-avoiding path through `base`, sampled at
/// `samples` points.
pub fn seeded_path(
    base: &ParameterPoint<f64>,
    seed: u64,
    samples: usize,
) -> Result<Vec<ParameterPoint<f64>>> {
    'attempt: for attempt in 0..16u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt * 0x51ab));
        let alphas: Vec<f64> = (0..base.x.len()).map(|_| rng.gen_range(-0.4..0.4)).collect();
        let rhos: Vec<f64> = (0..base.x.len()).map(|_| rng.gen_range(-0.15..0.15)).collect();
        let mut points = Vec::with_capacity(samples);
        for s in 0..samples {
            let t = s as f64 / (samples - 1) as f64;
            let x = base
                .x
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * C64::from_polar(1.0 + rhos[j] * t * (1.0 - t), alphas[j] * t)
                })
                .collect();
            let p = ParameterPoint::new(x);
            if !crate::poly::check_nondegenerate(&p, 1e-8) {
                continue 'attempt;
            }
            points.push(p);
        }
        return Ok(points);
    }
    Err(Error::Degenerate("no discriminant-avoiding path found".into()))
}

/// Entrywise spread of the pairing matrix along a seeded path.
pub fn check_constancy(
    base: &ParameterPoint<f64>,
    seed: u64,
    paths: usize,
    samples: usize,
    qcfg: &QuadratureConfig<f64>,
    tol: &Tolerances,
) -> Result<CheckRecord> {
    let mut worst = 0.0f64;
    for p in 0..paths {
        let pts = seeded_path(base, seed.wrapping_add(p as u64), samples)?;
        let mats = crate::monodromy::pairing_matrices_along(&pts, 2, qcfg, tol.rank)?;
        worst = worst.max(matrix_spread(&mats));
    }
    Ok(CheckRecord::from_deviation(
        "pairing-constancy",
        format!("{} paths={paths} samples={samples}", x_digest(base)),
        json!(worst),
        json!(0.0),
        PROV_DERIVED,
        worst,
        tol.constancy,
    ))
}

// ---------------------------------------------------------------------------
// solution identity checks
// ---------------------------------------------------------------------------

pub fn check_solution_identities(
    x: &ParameterPoint<f64>,
    degree_bound: i64,
    qcfg: &QuadratureConfig<f64>,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    let n = x.n();
    let inputs = x_digest(x);
    let roots = find_roots(x)?;
    let (phis, psis) = solution_family(x, &roots, degree_bound, qcfg)?;

    let mut euler_phi = euler_check(&phis[0], x);
    for t in &phis[1..] {
        euler_phi = euler_phi.max(euler_check(t, x));
    }
    let mut euler_psi_root = 0.0f64;
    for t in &psis[1..] {
        euler_psi_root = euler_psi_root.max(euler_check(t, x));
    }
    let euler_line = euler_check(&psis[0], x);

    // quadrature residues against the closed degree-one forms
    let mut closed_dev = 0.0f64;
    for k in 0..n {
        for a in 0..=n as i64 {
            let closed = closed_form_degree_one(x, roots.roots[k], a);
            let quad = phis[1 + k].value(&LatticePoint::new(a, 1))?;
            closed_dev = closed_dev.max((closed - quad).norm());
        }
    }

    // Σ_k Ψ^{γ_k} = 0 entrywise
    let mut psi_sum_dev = 0.0f64;
    for (c, _) in psis[1].values.iter() {
        let mut acc = C64::new(0.0, 0.0);
        for t in &psis[1..] {
            acc += t.value(c)?;
        }
        psi_sum_dev = psi_sum_dev.max(acc.norm());
    }

    // Σ_k Φ^{γ_k} = α Φ⁰: degree-positive entries vanish, α is reported
    let mut phi_sum_dev = 0.0f64;
    let mut alpha = C64::new(0.0, 0.0);
    for (c, _) in phis[1].values.iter() {
        let mut acc = C64::new(0.0, 0.0);
        for t in &phis[1..] {
            acc += t.value(c)?;
        }
        if c.degree() == 0 {
            alpha = acc;
        } else {
            phi_sum_dev = phi_sum_dev.max(acc.norm());
        }
    }

    // finite-difference shift identity on a root solution pair
    let mut deriv_dev = 0.0f64;
    for k in [0, n - 1] {
        let base_root = roots.roots[k];
        let base_branch = phis[1 + k].branch.unwrap();
        let phi_factory = |q: &ParameterPoint<f64>| {
            let rs = find_roots(q)?;
            let kk = nearest_root(&rs.roots, base_root);
            let branch = BranchRecord {
                log_root: base_branch.log_root + (rs.roots[kk] / base_root).ln(),
                log_x0: base_branch.log_x0 + (q.x[0] / x.x[0]).ln(),
                log_xn: base_branch.log_xn + (q.x[n] / x.x[n]).ln(),
            };
            phi_at_root_with_branch(q, &rs, kk, 2, qcfg, branch)
        };
        let psi_factory = |q: &ParameterPoint<f64>| {
            let rs = find_roots(q)?;
            let kk = nearest_root(&rs.roots, base_root);
            psi_at_root(q, &rs, kk, 2, qcfg)
        };
        for j in [0usize, n] {
            deriv_dev = deriv_dev
                .max(derivative_check(&phi_factory, x, &LatticePoint::origin(), j, 1e-4)?);
            deriv_dev = deriv_dev
                .max(derivative_check(&phi_factory, x, &LatticePoint::new(1, 1), j, 1e-4)?);
            deriv_dev = deriv_dev
                .max(derivative_check(&psi_factory, x, &LatticePoint::new(1, 1), j, 1e-4)?);
        }
    }

    let dev = |name: &str, d: f64, t: f64, prov: &str| {
        CheckRecord::from_deviation(name, inputs.clone(), json!(d), json!(0.0), prov, d, t)
    };
    let mut alpha_rec = dev("phi-sum-multiple-of-trivial", phi_sum_dev, tol.solution_relations, PROV_DERIVED);
    alpha_rec.computed = json!({ "positive_degree_residual": phi_sum_dev, "alpha": [alpha.re, alpha.im] });
    Ok(vec![
        dev("euler-phi-residue", euler_phi, tol.euler_residue, PROV_DERIVED),
        dev("euler-psi-residue", euler_psi_root, tol.euler_residue, PROV_DERIVED),
        dev("euler-psi-line", euler_line, tol.euler_line, PROV_DERIVED),
        dev("residue-closed-forms", closed_dev, tol.residue_closed_form, PROV_PAPER),
        dev("psi-sum-relation", psi_sum_dev, tol.solution_relations, PROV_PAPER),
        alpha_rec,
        dev("derivative-shift", deriv_dev, tol.derivative, PROV_DERIVED),
    ])
}

// ---------------------------------------------------------------------------
// gamma and monodromy checks
// ---------------------------------------------------------------------------

pub fn check_gamma_duality(
    fan: &Fan,
    trunc: Truncation,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    let rep = verify_duality::<f64>(fan, trunc, seed)?;
    let inputs = format!("fan n={} rays={:?} seed={seed}", fan.n(), fan.rays());
    Ok(vec![
        CheckRecord::from_deviation(
            "gamma-duality",
            inputs.clone(),
            matrix_json(&rep.computed.entries),
            matrix_json(&rep.expected.entries),
            PROV_PAPER,
            rep.max_rel_deviation,
            tol.gamma_duality,
        ),
        CheckRecord::from_deviation(
            "gamma-tail-certificate",
            inputs,
            json!(rep.tail),
            json!(0.0),
            PROV_DERIVED,
            rep.tail,
            tol.gamma_tail,
        ),
    ])
}

pub fn check_monodromy(
    x: &ParameterPoint<f64>,
    specs: &[LoopSpec],
    qcfg: &QuadratureConfig<f64>,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for spec in specs {
        let path = match spec.kind {
            LoopKind::Circle => ParameterPath::coordinate_circle(x, spec.coordinate, spec.segments),
            LoopKind::Small => {
                ParameterPath::small_loop(x, spec.coordinate, spec.radius, spec.segments)
            }
        };
        let rep = verify_pairing_invariance(&path, 2, qcfg, tol.rank)?;
        let name = match spec.kind {
            LoopKind::Circle => format!("monodromy-circle-x{}", spec.coordinate),
            LoopKind::Small => format!("monodromy-small-loop-x{}", spec.coordinate),
        };
        let increments: Vec<Value> =
            rep.log_increments.iter().map(|v| json!([v.re, v.im])).collect();
        let mut rec = CheckRecord::from_deviation(
            name,
            x_digest(x),
            json!({
                "permutation": rep.permutation,
                "log_increments": increments,
                "crossings": rep.crossings,
                "deviation": rep.deviation,
            }),
            json!("pairing matrix invariant under continuation"),
            PROV_DERIVED,
            rep.deviation,
            tol.monodromy,
        );
        if matches!(spec.kind, LoopKind::Small) && !rep.permutation.iter().enumerate().all(|(i, &p)| i == p)
        {
            rec.pass = false;
            rec.expected = json!("identity permutation on a contractible loop");
        }
        out.push(rec);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

/// The full check suite for one configuration.
pub fn verify_all(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let fan = cfg.fan()?;
    let qcfg = QuadratureConfig::default();
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();

    checks.push(check_mg_inverse(&fan));
    checks.extend(check_chi_consistency(&fan)?);
    checks.extend(check_ch_relations(&fan, tol));

    let points = cfg.parameter_points(seed)?;
    for x in &points {
        checks.extend(check_pairing_matrix(x, &qcfg, tol)?);
        checks.extend(check_solution_identities(x, cfg.degree_bound, &qcfg, tol)?);
    }
    if let Some(x) = points.first() {
        checks.push(check_constancy(x, seed, 1, 8, &qcfg, tol)?);
        let specs = if cfg.loops.is_empty() {
            vec![
                LoopSpec { coordinate: 0, kind: LoopKind::Circle, radius: 0.25, segments: 48 },
                LoopSpec { coordinate: 1, kind: LoopKind::Small, radius: 0.2, segments: 24 },
            ]
        } else {
            cfg.loops.clone()
        };
        checks.extend(check_monodromy(x, &specs, &qcfg, tol)?);
    }
    checks.extend(check_gamma_duality(&fan, cfg.truncation(), seed, tol)?);

    Ok(Report::new(cfg.digest(seed), seed, checks))
}

// ---------------------------------------------------------------------------
// per-subcommand payloads
// ---------------------------------------------------------------------------

fn table_json(t: &SolutionTable<f64>) -> Value {
    let entries: Vec<Value> =
        t.values.iter().map(|(c, v)| json!([c.a, c.b, v.re, v.im])).collect();
    let branch = t.branch.map(|b| {
        json!({
            "log_root": [b.log_root.re, b.log_root.im],
            "log_x0": [b.log_x0.re, b.log_x0.im],
            "log_xn": [b.log_xn.re, b.log_xn.im],
        })
    });
    json!({
        "label": format!("{:?}", t.label),
        "degree_bound": t.degree_bound,
        "interior_only": t.interior_only,
        "entries": entries,
        "branch": branch,
    })
}

pub fn run_roots(cfg: &RunConfig, seed: u64) -> Result<Value> {
    let mut reports = Vec::new();
    for x in cfg.parameter_points(seed)? {
        let set = find_roots(&x)?;
        reports.push(json!({
            "x": x.x.iter().map(|v| json!([v.re, v.im])).collect::<Vec<_>>(),
            "roots": set.roots.iter().map(|v| json!([v.re, v.im])).collect::<Vec<_>>(),
            "residual": set.residual,
            "min_separation": set.min_separation(),
        }));
    }
    Ok(json!({ "config": cfg.digest(seed), "points": reports }))
}

pub fn run_solve(cfg: &RunConfig, seed: u64) -> Result<Value> {
    let qcfg = QuadratureConfig::default();
    let mut reports = Vec::new();
    for x in cfg.parameter_points(seed)? {
        let roots = find_roots(&x)?;
        let (phis, psis) = solution_family(&x, &roots, cfg.degree_bound, &qcfg)?;
        reports.push(json!({
            "x": x.x.iter().map(|v| json!([v.re, v.im])).collect::<Vec<_>>(),
            "phi": phis.iter().map(table_json).collect::<Vec<_>>(),
            "psi": psis.iter().map(table_json).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "config": cfg.digest(seed), "solutions": reports }))
}

pub fn run_pair(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let qcfg = QuadratureConfig::default();
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let points = cfg.parameter_points(seed)?;
    for x in &points {
        checks.extend(check_pairing_matrix(x, &qcfg, tol)?);
    }
    if let Some(x) = points.first() {
        checks.push(check_constancy(x, seed, 1, 8, &qcfg, tol)?);
    }
    Ok(Report::new(cfg.digest(seed), seed, checks))
}

pub fn run_chi(cfg: &RunConfig, seed: u64) -> Result<Value> {
    let fan = cfg.fan()?;
    let basis = Basis::new(fan.clone());
    let m = m_matrix::<Rat>(&basis);
    let g = g_matrix::<Rat>(&basis);
    let exact = match (chi_matrix::<QuadRat>(&basis), chi_inverse::<QuadRat>(&basis)) {
        (Ok(a), Ok(b)) => Some(json!({
            "chi": a.entries.iter().map(|r| r.iter().map(|v| json!(v.to_string())).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "chi_inverse": b.entries.iter().map(|r| r.iter().map(|v| json!(v.to_string())).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "identity": is_identity(&tensor_contract(&b, &a)),
        })),
        _ => None,
    };
    let chi_c = chi_matrix::<C64>(&basis)?;
    let inv_c = chi_inverse::<C64>(&basis)?;
    Ok(json!({
        "config": cfg.digest(seed),
        "h_basis": basis.h_labels(),
        "hc_basis": basis.hc_labels(),
        "m": rat_matrix_json(&m),
        "g": rat_matrix_json(&g),
        "exact": exact,
        "chi_complex": matrix_json(&chi_c.entries),
        "chi_inverse_complex": matrix_json(&inv_c.entries),
        "relations_exact": ch_relations_hold_exact(&basis),
        "relations_residual": ch_relations_residual::<f64>(&basis),
    }))
}

pub fn run_gamma(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let fan = cfg.fan()?;
    let checks = check_gamma_duality(&fan, cfg.truncation(), seed, &cfg.tolerances)?;
    Ok(Report::new(cfg.digest(seed), seed, checks))
}

pub fn run_monodromy(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let qcfg = QuadratureConfig::default();
    let points = cfg.parameter_points(seed)?;
    let x = points
        .first()
        .ok_or_else(|| Error::Config("monodromy needs at least one parameter point".into()))?;
    let specs = if cfg.loops.is_empty() {
        vec![LoopSpec { coordinate: 0, kind: LoopKind::Circle, radius: 0.25, segments: 48 }]
    } else {
        cfg.loops.clone()
    };
    let checks = check_monodromy(x, &specs, &qcfg, &cfg.tolerances)?;
    Ok(Report::new(cfg.digest(seed), seed, checks))
}

/// Solution tables of both Gamma series at the configured basepoint
/// (exposed by the `gamma` subcommand with `--emit-tables`).
pub fn gamma_tables_payload(cfg: &RunConfig, seed: u64) -> Result<Value> {
    let fan = cfg.fan()?;
    let basis = Basis::new(fan.clone());
    let trunc = cfg.truncation();
    let x = choose_basepoint::<f64>(&fan, trunc.epsilon, seed)?;
    let ctx = GammaContext::new(&basis, x.clone(), trunc)?;
    let (phis, tail_h) = ctx.h_component_tables(cfg.degree_bound.min(trunc.l_max - 2))?;
    let (psis, tail_hc) = ctx.hc_component_tables(cfg.degree_bound.min(trunc.l_max - 2))?;
    Ok(json!({
        "basepoint": x.x.iter().map(|v| json!([v.re, v.im])).collect::<Vec<_>>(),
        "h_tables": phis.iter().map(table_json).collect::<Vec<_>>(),
        "hc_tables": psis.iter().map(table_json).collect::<Vec<_>>(),
        "tail": tail_h.max(tail_hc),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_cfg() -> RunConfig {
        RunConfig::from_json(r#"{"n": 2, "rays": [0, 2]}"#).unwrap()
    }

    #[test]
    fn default_config_suite_passes() {
        let report = verify_all(&default_cfg(), 7).unwrap();
        assert!(report.all_pass(), "{}", report.to_text());
    }

    #[test]
    fn degenerate_explicit_point_is_rejected_with_diagnostic() {
        let cfg = RunConfig::from_json(
            r#"{"n": 2, "rays": [0, 2],
                "parameters": {"mode": "explicit", "x": [[1,0],[2,0],[1,0]]}}"#,
        )
        .unwrap();
        match verify_all(&cfg, 7) {
            Err(Error::Degenerate(msg)) => assert!(msg.contains("collide"), "{msg}"),
            other => panic!("expected degenerate failure, got {other:?}"),
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = default_cfg();
        let a = verify_all(&cfg, 42).unwrap().to_json_string();
        let b = verify_all(&cfg, 42).unwrap().to_json_string();
        assert_eq!(a, b);
    }

    #[test]
    fn text_rendering_mentions_failures() {
        let rec = CheckRecord::from_deviation(
            "demo",
            "in",
            json!(1.0),
            json!(0.0),
            PROV_TRIVIAL,
            1.0,
            0.5,
        );
        let report = Report::new("d".into(), 0, vec![rec]);
        let text = report.to_text();
        assert!(text.contains("FAIL"));
        assert!(text.contains("computed"));
        assert!(!report.all_pass());
    }
}
