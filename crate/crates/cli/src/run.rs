//! One runner per experiment kind.

use dirlab_core::contraction::{
    ball_sandwich_check, bracket_defect, coefficient_convergence, eigenvalue_contraction_experiment, haar_density_ratio,
    milnor_relation_error, su2_small_deviation_experiment, ConvergenceTable, SmallDeviationConfig,
};
use dirlab_core::discrete::{
    assemble_cylindrical, assemble_euclidean, assemble_gasket, assemble_heisenberg_spacing, CylindricalGrid,
    OperatorMesh, Su2Coefficients,
};
use dirlab_core::kernels::KernelBound;
use dirlab_core::scaling::{
    carnot_dilation, euclidean_dilation, gasket_eigen_scaling, verify_energy_scaling, verify_semigroup_factorization,
    Element,
};
use dirlab_core::spectral::{
    eigensolve, ground_state_audit, heat_content_series, lp_bound_audit, SpectralData,
};
use dirlab_core::stochastic::{
    exit_scaling_check, heat_content_estimate, simulate, small_deviation_estimate, McConfig, Process,
};
use dirlab_core::space::DilationKind;
use dirlab_core::{make_domain, Domain, Error, Shape, SpaceKind};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Kind, MeshSection};

#[derive(Debug)]
pub enum RunError {
    /// Bad configuration; exit status 2.
    Config(String),
    /// A numerical routine failed; exit status 3.
    Numerical(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::EmptyDomain(_) | Error::Unsupported(_) | Error::IncompatibleMesh(_) => {
                RunError::Config(e.to_string())
            }
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<String> for RunError {
    fn from(e: String) -> Self {
        RunError::Config(e)
    }
}

impl From<&str> for RunError {
    fn from(e: &str) -> Self {
        RunError::Config(e.into())
    }
}

type Res<T> = std::result::Result<T, RunError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub module: &'static str,
    pub name: String,
    pub status: Status,
    pub hard: bool,
    pub detail: String,
}

impl Audit {
    fn new(module: &'static str, name: impl Into<String>, pass: bool, hard: bool, detail: impl Into<String>) -> Self {
        Audit {
            module,
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            hard,
            detail: detail.into(),
        }
    }

    fn skipped(module: &'static str, name: impl Into<String>, detail: impl Into<String>) -> Self {
        Audit {
            module,
            name: name.into(),
            status: Status::Skipped,
            hard: false,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip form, dot decimal, exponent for extremes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct RunOutput {
    pub table: Table,
    pub results: Value,
    pub audits: Vec<Audit>,
}

pub fn execute(cfg: &ExperimentConfig) -> Res<RunOutput> {
    match cfg.kind {
        Kind::Spectrum => spectrum(cfg),
        Kind::Smalldev => smalldev(cfg),
        Kind::Heatcontent => heatcontent(cfg),
        Kind::DilationCheck => dilation_check(cfg),
        Kind::Contraction => contraction(cfg),
        Kind::KernelBounds => kernel_bounds(cfg),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable")
}

fn domain(cfg: &ExperimentConfig) -> Res<Domain> {
    let space = cfg.require(&cfg.space, "space")?.model()?;
    let shape = match (&cfg.domain, space.kind) {
        (Some(s), _) => s.clone(),
        (None, SpaceKind::Gasket { .. }) => Shape::GasketCells { words: vec![] },
        (None, _) => return Err(RunError::Config(format!("kind {} needs a [domain] section", cfg.kind.name()))),
    };
    Ok(make_domain(space, shape)?)
}

fn build_mesh(domain: &Domain, m: &MeshSection) -> Res<OperatorMesh> {
    let scale = domain.space.generator_scale;
    Ok(match domain.space.kind {
        SpaceKind::Euclidean { .. } => assemble_euclidean(domain, m.h, scale)?,
        SpaceKind::Heisenberg3 => assemble_heisenberg_spacing(domain, [m.h, m.h, m.hz.unwrap_or(m.h)])?,
        SpaceKind::Su2Chart => {
            assemble_cylindrical(domain, CylindricalGrid::uniform(domain, m.h), Su2Coefficients { r: Some(1.0) })?
        }
        SpaceKind::Gasket { level } => {
            if !matches!(&domain.shape, Shape::GasketCells { words } if words.is_empty()) {
                return Err(RunError::Config("gasket meshes cover the whole gasket; leave domain.words empty".into()));
            }
            assemble_gasket(level)?.with_scale(scale)
        }
    })
}

fn solve(cfg: &ExperimentConfig, domain: &Domain) -> Res<(OperatorMesh, SpectralData)> {
    let m = cfg.require(&cfg.mesh, "mesh")?;
    let mesh = build_mesh(domain, m)?;
    let k = m.k.min(mesh.n());
    let sd = eigensolve(&mesh, k)?;
    Ok((mesh, sd))
}

fn mc(cfg: &ExperimentConfig) -> McConfig {
    cfg.mc.clone().unwrap_or_default().config(cfg.seed)
}

fn spectral_audits(domain: &Domain, sd: &SpectralData, audits: &mut Vec<Audit>) -> Res<Value> {
    let worst = sd.residuals.iter().copied().fold(0.0, f64::max);
    audits.push(Audit::new("spectral", "residuals", worst <= 1e-6, true, format!("max relative residual {worst:.3e}")));
    let gram = sd.gram_error();
    audits.push(Audit::new("spectral", "orthonormality", gram <= 1e-8, true, format!("gram error {gram:.3e}")));
    if sd.k() < 2 {
        audits.push(Audit::skipped("spectral", "ground_state", "needs two eigenpairs"));
        return Ok(Value::Null);
    }
    let gs = ground_state_audit(sd)?;
    let ok = gs.simple && gs.positive_after_sign_fix;
    let detail = format!("gap {:.3e}, simple {}, positive {}", gs.gap, gs.simple, gs.positive_after_sign_fix);
    if domain.connected {
        audits.push(Audit::new("spectral", "ground_state", ok, true, detail));
    } else {
        // a disconnected domain should fail the simplicity check
        audits.push(Audit::new("spectral", "disconnection_detected", !gs.simple, false, detail));
    }
    Ok(to_value(&gs))
}

fn spectrum(cfg: &ExperimentConfig) -> Res<RunOutput> {
    let domain = domain(cfg)?;
    let (mesh, sd) = solve(cfg, &domain)?;
    let mut audits = Vec::new();
    let gs = spectral_audits(&domain, &sd, &mut audits)?;
    let mut table = Table::new(&["n", "lambda", "residual", "coefficient"]);
    for i in 0..sd.k() {
        table.push(vec![
            (i + 1).to_string(),
            num(sd.eigenvalues[i]),
            num(sd.residuals[i]),
            num(sd.coefficients[i]),
        ]);
    }
    let mut lp = Value::Null;
    if let Some(b) = &cfg.bounds {
        let b = KernelBound::new(*b)?;
        let rows = lp_bound_audit(&sd, &b)?;
        for r in &rows {
            audits.push(Audit::new("spectral", format!("lp_bounds_n{}", r.n), r.pass(), true, format!("sup {:.4} ≤ {:.4}", r.sup_norm, r.sup_bound)));
        }
        lp = to_value(&rows);
    }
    Ok(RunOutput {
        table,
        results: json!({
            "mesh": mesh.label,
            "nodes": mesh.n(),
            "measure": sd.measure,
            "method": sd.method,
            "eigenvalues": sd.eigenvalues,
            "ground_state": gs,
            "lp_bounds": lp,
        }),
        audits,
    })
}

fn soft(cfg: &ExperimentConfig) -> bool {
    cfg.strict
}

fn smalldev(cfg: &ExperimentConfig) -> Res<RunOutput> {
    let sec = cfg.require(&cfg.smalldev, "smalldev")?;
    let space = cfg.require(&cfg.space, "space")?.model()?;
    let process = Process::for_space(&space)?;
    let (lambda1, target) = match (sec.lambda1, sec.target) {
        (Some(l), Some(t)) => (l, Some(t)),
        (l, t) => {
            if cfg.mesh.is_some() && cfg.domain.is_some() {
                let d = domain(cfg)?;
                let (mesh, sd) = solve(cfg, &d)?;
                let i = mesh.nearest_node(&sec.start);
                let c = sd.coefficients[0] * sd.eigenfunctions[0][i];
                (l.unwrap_or(sd.eigenvalues[0]), Some(t.unwrap_or(c)))
            } else {
                (l.ok_or("smalldev needs lambda1 or a [domain] and [mesh] to compute it")?, t)
            }
        }
    };
    let rows = small_deviation_estimate(process, sec.start, sec.t, &sec.eps, lambda1, sec.beta, &mc(cfg))?;
    let mut table = Table::new(&["eps", "estimate", "ci95", "survived", "scaled", "scaled_ci95", "minus_log", "target"]);
    let mut audits = Vec::new();
    for r in &rows {
        table.push(vec![
            num(r.eps),
            num(r.estimate),
            num(r.ci95),
            r.survived.to_string(),
            num(r.scaled),
            num(r.scaled_ci95),
            num(r.minus_log),
            opt(target),
        ]);
        match target {
            Some(t) => audits.push(Audit::new(
                "stochastic",
                format!("scaled_eps_{}", r.eps),
                !r.flagged && (r.scaled - t).abs() <= sec.rel_tol * t,
                soft(cfg),
                format!("{:.4} ± {:.4} vs {t:.4}", r.scaled, r.scaled_ci95),
            )),
            None => audits.push(Audit::skipped("stochastic", format!("scaled_eps_{}", r.eps), "no target")),
        }
    }
    if let Some(last) = rows.last() {
        let want = lambda1 * sec.t;
        audits.push(Audit::new(
            "stochastic",
            "minus_log_smallest_eps",
            (last.minus_log - want).abs() <= sec.rel_tol * want,
            soft(cfg),
            format!("{:.4} vs λ₁t = {want:.4}", last.minus_log),
        ));
    }
    Ok(RunOutput {
        table,
        results: json!({ "lambda1": lambda1, "target": target, "process": process.name(), "rows": rows }),
        audits,
    })
}

fn heatcontent(cfg: &ExperimentConfig) -> Res<RunOutput> {
    let sec = cfg.require(&cfg.heatcontent, "heatcontent")?;
    let domain = domain(cfg)?;
    let (_, sd) = solve(cfg, &domain)?;
    if let Some(t) = sec.mc_t.iter().find(|t| !sec.t_list.contains(t)) {
        return Err(RunError::Config(format!("heatcontent.mc_t entry {t} is not in t_list")));
    }
    let mut audits = Vec::new();
    let mut table = Table::new(&["t", "q_series", "tail_bound", "asymptote", "normalized", "q_mc", "q_mc_ci95"]);
    let quad = if sec.mc_t.is_empty() {
        None
    } else {
        let m = cfg.require(&cfg.mesh, "mesh")?;
        let q = MeshSection {
            h: sec.quadrature_h.unwrap_or(m.h),
            ..m.clone()
        };
        Some(build_mesh(&domain, &q)?)
    };
    let process = Process::for_space(&domain.space)?;
    let mut series = Vec::new();
    let mut mcs = Vec::new();
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut sorted = sec.t_list.clone();
    sorted.sort_by(f64::total_cmp);
    for (i, &t) in sorted.iter().enumerate() {
        let hc = heat_content_series(&sd, t)?;
        monotone &= hc.q <= prev && hc.q >= 0.0;
        prev = hc.q;
        let mut mc_cells = (String::new(), String::new());
        if let (true, Some(qm)) = (sec.mc_t.contains(&t), &quad) {
            let cfg_t = McConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                ..mc(cfg)
            };
            let est = heat_content_estimate(process, &domain, &qm.nodes, &qm.weights, t, &cfg_t)?;
            audits.push(Audit::new(
                "stochastic",
                format!("heat_content_t_{t}"),
                (est.q - hc.q).abs() <= sec.rel_tol * hc.q,
                soft(cfg),
                format!("MC {:.5} ± {:.5} vs series {:.5}", est.q, est.ci95, hc.q),
            ));
            mc_cells = (num(est.q), num(est.ci95));
            mcs.push(json!({ "t": t, "q": est.q, "ci95": est.ci95, "nodes": qm.n() }));
        }
        table.push(vec![
            num(t),
            num(hc.q),
            num(hc.tail_bound),
            num(hc.asymptote),
            num(hc.q * (sd.eigenvalues[0] * t).exp()),
            mc_cells.0,
            mc_cells.1,
        ]);
        series.push(hc);
    }
    audits.push(Audit::new("spectral", "heat_content_decreasing", monotone, true, "Q(t) nonnegative and nonincreasing"));
    Ok(RunOutput {
        table,
        results: json!({ "lambda1": sd.eigenvalues[0], "series": series, "monte_carlo": mcs }),
        audits,
    })
}

fn dilation_check(cfg: &ExperimentConfig) -> Res<RunOutput> {
    let domain = domain(cfg)?;
    let mut audits = Vec::new();
    let mut table = Table::new(&["check", "index", "value", "expected", "rel_dev"]);
    if let SpaceKind::Gasket { level } = domain.space.kind {
        if level < 2 {
            return Err(RunError::Config("gasket dilation check needs level ≥ 2".into()));
        }
        let levels: Vec<u32> = (1..=level).collect();
        let rep = gasket_eigen_scaling(&levels, 3)?;
        for (i, r) in rep.ratios.iter().enumerate() {
            let m = levels[i];
            table.push(vec!["gasket_ratio".into(), m.to_string(), num(*r), num(5.0), num((r / 5.0 - 1.0).abs())]);
            if m >= 3 {
                audits.push(Audit::new("scaling", format!("gasket_ratio_{m}"), (r / 5.0 - 1.0).abs() <= 0.03, true, format!("{r:.5}")));
            }
        }
        table.push(vec!["gasket_envelope_c".into(), "0".into(), num(rep.envelope_c), String::new(), String::new()]);
        return Ok(RunOutput {
            table,
            results: to_value(&rep),
            audits,
        });
    }
    let sec = cfg.require(&cfg.dilation, "dilation")?;
    let m = cfg.require(&cfg.mesh, "mesh")?;
    let (ds, kind, process) = match domain.space.kind {
        SpaceKind::Euclidean { n } => (euclidean_dilation(n)?, DilationKind::Isotropic, Process::for_space(&domain.space)?),
        SpaceKind::Heisenberg3 => (carnot_dilation(4.0)?, DilationKind::Heisenberg, Process::for_space(&domain.space)?),
        _ => return Err(RunError::Config("dilation_check runs on euclidean, heisenberg3 or gasket".into())),
    };
    let r = sec.r;
    let base = build_mesh(&domain, m)?;
    let big = domain.dilated(r, kind)?;
    let hz = m.hz.unwrap_or(m.h);
    let dil_mesh = build_mesh(
        &big,
        &MeshSection {
            h: m.h * r,
            hz: Some(if kind == DilationKind::Heisenberg { hz * r * r } else { hz * r }),
            k: m.k,
        },
    )?;
    let energy = verify_energy_scaling(&ds, &base, &dil_mesh, r, sec.samples, cfg.seed)?;
    let fact = verify_semigroup_factorization(&ds, &base, &dil_mesh, r, sec.t, sec.samples, cfg.seed)?;
    let ell = ds.ell(Element::Real(r))?;
    table.push(vec!["energy_ratio_min".into(), "0".into(), num(energy.min_ratio), num(energy.expected), num(energy.max_rel_dev)]);
    table.push(vec!["energy_ratio_max".into(), "0".into(), num(energy.max_ratio), num(energy.expected), num(energy.max_rel_dev)]);
    table.push(vec!["ell".into(), "0".into(), num(ell), num(r * r), num((ell / (r * r) - 1.0).abs())]);
    table.push(vec!["factorization".into(), "0".into(), num(fact.max_rel_dev), num(0.0), num(fact.max_rel_dev)]);
    for (i, q) in fact.eigen_ratios.iter().enumerate() {
        table.push(vec!["eigen_ratio".into(), (i + 1).to_string(), num(*q), num(1.0), num((q - 1.0).abs())]);
        audits.push(Audit::new("scaling", format!("eigen_ratio_{}", i + 1), (q - 1.0).abs() <= 0.02, true, format!("{q:.6}")));
    }
    audits.push(Audit::new("scaling", "energy_scaling", energy.pass, true, format!("max rel dev {:.3e}", energy.max_rel_dev)));
    audits.push(Audit::new("scaling", "semigroup_factorization", fact.pass, true, format!("max rel dev {:.3e}", fact.max_rel_dev)));
    audits.push(Audit::new("scaling", "ell_is_r_squared", (ell / (r * r) - 1.0).abs() <= 1e-12, true, format!("ℓ = {ell}")));
    let mut exit = Value::Null;
    match sec.mc_start {
        Some(start) => {
            let rep = exit_scaling_check(process, &domain, start, r, sec.mc_t.unwrap_or(sec.t), &mc(cfg))?;
            table.push(vec!["exit_scaling".into(), "0".into(), num(rep.dilated.estimate), num(rep.base.estimate), num(rep.difference.abs())]);
            audits.push(Audit::new(
                "stochastic",
                "exit_time_scaling",
                rep.agree,
                soft(cfg),
                format!("difference {:.5}, joint CI {:.5}", rep.difference, rep.joint_ci95),
            ));
            exit = to_value(&rep);
        }
        None => audits.push(Audit::skipped("stochastic", "exit_time_scaling", "no dilation.mc_start")),
    }
    Ok(RunOutput {
        table,
        results: json!({ "energy": energy, "factorization": fact, "ell": ell, "exit_scaling": exit }),
        audits,
    })
}

fn push_convergence<R>(table: &mut Table, name: &str, t: &ConvergenceTable<R>) {
    for (r, dev) in &t.per_r {
        table.push(vec![name.into(), num(*r), String::new(), num(*dev), String::new()]);
    }
    table.push(vec![format!("{name}_rate"), String::new(), String::new(), num(t.rate), num(2.0)]);
}

fn contraction(cfg: &ExperimentConfig) -> Res<RunOutput> {
    let sec = cfg.contraction.clone().ok_or("kind contraction needs a [contraction] section")?;
    let mut table = Table::new(&["table", "r", "index", "value", "reference"]);
    let mut audits = Vec::new();

    let milnor = milnor_relation_error();
    audits.push(Audit::new("contraction", "milnor_relations", milnor <= 1e-14, true, format!("max error {milnor:.2e}")));

    let (v, w) = ([0.3, -1.2, 0.7], [1.1, 0.4, -0.5]);
    let mut per_eps = Vec::new();
    for &eps in &sec.bracket_eps {
        let d = bracket_defect(eps, &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0])?;
        let g = bracket_defect(eps, &v, &w)?;
        table.push(vec!["bracket_defect".into(), num(eps), String::new(), num(d), num(eps)]);
        per_eps.push(g / eps);
    }
    let spread = per_eps.iter().map(|x| (x / per_eps[0] - 1.0).abs()).fold(0.0, f64::max);
    audits.push(Audit::new("contraction", "bracket_defect_linear", spread <= 1e-8, true, format!("defect/ε spread {spread:.2e}")));

    let coeff = coefficient_convergence(&sec.r_list, &sec.rho_grid)?;
    push_convergence(&mut table, "coefficients", &coeff);
    audits.push(Audit::new("contraction", "coefficient_rate", (coeff.rate - 2.0).abs() <= 0.3, true, format!("{:.4}", coeff.rate)));
    let haar = haar_density_ratio(&sec.r_list, &sec.rho_grid)?;
    push_convergence(&mut table, "haar", &haar);
    audits.push(Audit::new("contraction", "haar_rate", (haar.rate - 2.0).abs() <= 0.3, true, format!("{:.4}", haar.rate)));

    let mut sandwiches = Vec::new();
    for &r in &sec.sandwich_r {
        let s = ball_sandwich_check(r, sec.sandwich_tol, sec.sandwich_model, 24)?;
        table.push(vec!["sandwich_min".into(), num(r), String::new(), num(s.min_gauge), num(1.0)]);
        table.push(vec!["sandwich_max".into(), num(r), String::new(), num(s.max_gauge), num(1.0)]);
        audits.push(Audit::new(
            "contraction",
            format!("sandwich_r_{r}"),
            s.pass,
            true,
            format!("margins {:.3e} / {:.3e}", s.inner_margin, s.outer_margin),
        ));
        sandwiches.push(s);
    }
    if sandwiches.len() >= 2 {
        let m: Vec<f64> = sandwiches.iter().map(|s| s.inner_margin.max(s.outer_margin)).collect();
        let shrinking = sandwiches.windows(2).zip(m.windows(2)).all(|(s, m)| s[1].r >= s[0].r || m[1] <= m[0]);
        audits.push(Audit::new("contraction", "sandwich_margin_monotone", shrinking, true, format!("{m:?}")));
    }

    let mut eigen = Value::Null;
    if sec.eigen {
        let d = domain(cfg)?;
        let m = cfg.require(&cfg.mesh, "mesh")?;
        let k = m.k.min(5);
        let tab = eigenvalue_contraction_experiment(&sec.r_list, &d, m.h, k)?;
        for row in &tab.rows {
            table.push(vec![
                "eigenvalue".into(),
                opt(row.r),
                row.n.to_string(),
                num(row.eigenvalue),
                num(tab.limit[row.n - 1]),
            ]);
        }
        for n in 1..=k.min(3) {
            let gaps: Vec<f64> = tab.rows.iter().filter(|r| r.n == n && r.r.is_some()).map(|r| r.gap_to_limit).collect();
            let mono = gaps.windows(2).all(|g| g[1] < g[0]);
            let last = gaps.last().copied().unwrap_or(f64::NAN) / tab.limit[n - 1];
            audits.push(Audit::new("contraction", format!("eigen_monotone_n{n}"), mono, true, format!("{gaps:?}")));
            audits.push(Audit::new("contraction", format!("eigen_final_gap_n{n}"), last < 0.02, true, format!("{last:.3e}")));
        }
        eigen = to_value(&tab);
    }

    let mut smalldev = Value::Null;
    if let Some(sd) = &sec.small_deviation {
        let space = cfg.space.as_ref().map(|s| s.generator_scale).unwrap_or_default();
        let m = mc(cfg);
        let path = simulate(Process::Su2Sde { scale: space }, [0.0; 3], 1e4 * 1e-3, 1e-3, cfg.seed, 0, None)?;
        let worst = path.group_states.iter().map(|g| {
            let (a, b) = g.group_defects();
            a.max(b)
        });
        let worst = worst.fold(0.0, f64::max);
        audits.push(Audit::new("stochastic", "su2_group_invariants", worst <= 1e-9, true, format!("{worst:.2e} over {} steps", path.group_states.len() - 1)));
        let exp = su2_small_deviation_experiment(&SmallDeviationConfig {
            eps: sd.eps.clone(),
            horizons: sd.horizons,
            paths: m.paths,
            steps_per_unit: sd.steps_per_unit,
            seed: cfg.seed,
            scale: space,
            lambda_h: sd.lambda_h,
            control: sd.control,
        })?;
        for (i, row) in exp.rows.iter().enumerate() {
            table.push(vec![format!("lambda_hat_{}", row.process), num(row.eps), i.to_string(), num(row.lambda_hat), num(sd.lambda_h)]);
        }
        audits.push(Audit::new("stochastic", "small_deviation_flat", exp.flat, soft(cfg), "pairwise within joint CI"));
        audits.push(Audit::new(
            "stochastic",
            "small_deviation_rate",
            exp.max_rel_gap <= sd.rel_tol,
            soft(cfg),
            format!("max relative gap {:.4}", exp.max_rel_gap),
        ));
        smalldev = to_value(&exp);
    }

    Ok(RunOutput {
        table,
        results: json!({
            "milnor_error": milnor,
            "coefficients": { "per_r": coeff.per_r, "rate": coeff.rate },
            "haar": { "per_r": haar.per_r, "rate": haar.rate },
            "sandwich": sandwiches,
            "eigen": eigen,
            "small_deviation": smalldev,
        }),
        audits,
    })
}

fn kernel_bounds(cfg: &ExperimentConfig) -> Res<RunOutput> {
    let b = KernelBound::new(*cfg.require(&cfg.bounds, "bounds")?)?;
    let sec = cfg.require(&cfg.kernel_bounds, "kernel_bounds")?;
    let mut table = Table::new(&["lambda", "c", "t_star", "c_search", "t_search", "rel_dev"]);
    let mut audits = Vec::new();
    let mut worst = 0.0f64;
    for &l in &sec.lambdas {
        let (c, t) = b.lambda_envelope_constant(l)?;
        let (cs, ts) = b.lambda_envelope_constant_search(l)?;
        let dev = (cs / c - 1.0).abs();
        worst = worst.max(dev);
        table.push(vec![num(l), num(c), num(t), num(cs), num(ts), num(dev)]);
    }
    audits.push(Audit::new("kernels", "closed_form_vs_search", worst <= 1e-6, true, format!("max rel dev {worst:.2e}")));
    let mut lp = Value::Null;
    if cfg.domain.is_some() && cfg.mesh.is_some() {
        let d = domain(cfg)?;
        let (_, sd) = solve(cfg, &d)?;
        let rows = lp_bound_audit(&sd, &b)?;
        for r in &rows {
            audits.push(Audit::new(
                "spectral",
                format!("lp_bounds_n{}", r.n),
                r.pass(),
                true,
                format!("sup {:.4} ≤ {:.4}, l2 {:.4} ≤ {:.4}", r.sup_norm, r.sup_bound, r.l2_norm, r.l2_bound),
            ));
        }
        lp = to_value(&rows);
    }
    Ok(RunOutput {
        table,
        results: json!({ "family": b.family_name(), "lp_bounds": lp }),
        audits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes() {
        assert!(matches!(RunError::from(Error::InvalidArgument("h".into())), RunError::Config(_)));
        assert!(matches!(RunError::from(Error::EmptyDomain("d".into())), RunError::Config(_)));
        let e = Error::NoConvergence {
            iterations: 3,
            worst_residual: 1.0,
            residuals: vec![],
        };
        assert!(matches!(RunError::from(e), RunError::Numerical(_)));
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1e-12), "1e-12");
    }
}
