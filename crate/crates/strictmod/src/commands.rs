use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use strictmod_core::divisible::{build_tower_n1, embed_into_divisible, verify_divisible, EmbedRoute};
use strictmod_core::hopf::{build_residue_algebra, DEFAULT_SIZE_CAP};
use strictmod_core::modcat::{certify, residue_is_etale, residue_is_local, validate_module, ModuleHom};
use strictmod_core::points::{
    build_equations, gap_within_bound, min_pairwise_gap, points_match_character, solve_points, suggest_tame_tower,
    tame_character, EquationSystem, ExtensionTower, PointSet,
};
use strictmod_core::ramif::{max_break, prop7_step, theorem5_check};
use strictmod_core::sh::{applicable_flavors, check_functoriality, sh, ShFlavor};
use strictmod_core::{Error, SigmaModule, Q};

use crate::format::{
    kmat_json, load_module, matrix_json, parse_tower, read_json, series_json, series_text, tower_json, FormatError,
    LoadedModule,
};
use crate::report::Report;

#[derive(Parser, Debug)]
#[command(name = "strictmod", version, about = "Certify and analyse strict O0-module schemes given by matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FileArgs {
    /// Module file (JSON).
    pub input: PathBuf,
    /// Working precision; overrides the file and the environment.
    #[arg(long)]
    pub prec: Option<i64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Size cap on q^n for residue algebras.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Tower file, overriding the module file's tower.
    #[arg(long)]
    pub tower: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the module axioms and the strictness certificate.
    Validate(FileArgs),
    /// Build the residue Hopf algebra and recover the module from it.
    Roundtrip(FileArgs),
    /// Solve for the geometric points over a tame tower.
    Points(FileArgs),
    /// Tame character of a monomial-cyclic module.
    Character(FileArgs),
    /// Minimal distance between points against e/(q-1).
    Gap(FileArgs),
    /// Herbrand function and upper break of a tower.
    Ramify(FileArgs),
    /// The ramification bound e(N + 1/(q-1)) - 1.
    Bound(BoundArgs),
    /// Build and verify the divisible tower over a module killed by [pi0].
    Divisible(DivisibleArgs),
    /// Embed a module purely into a level of a divisible tower.
    Embed(EmbedArgs),
    /// Comparison invariants and their spanning axioms.
    Sh(ShArgs),
}

#[derive(Args, Debug, Clone)]
pub struct BoundArgs {
    /// `e=.. N=.. q=..`
    pub params: Vec<String>,
    /// Measured upper break to compare with the bound.
    #[arg(long = "break")]
    pub brk: Option<String>,
    /// Also evaluate one contraction step `max{alpha, (v - alpha)/q + alpha}` at `v`.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub v: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DivisibleArgs {
    #[command(flatten)]
    pub file: FileArgs,
    /// Number of levels.
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub file: FileArgs,
    /// Target level `N`; defaults to the [pi0]-nilpotency index.
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ShArgs {
    #[command(flatten)]
    pub file: FileArgs,
    /// One of e1, general, prime; all applicable flavors by default.
    #[arg(long)]
    pub flavor: Option<String>,
}

/// What a run produced: the text to emit and the exit status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (report, out) = match dispatch(&cli.command) {
        Ok(x) => x,
        Err(e) => return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let text = report.render();
    let code = report.exit_code();
    match out {
        Some(path) => match std::fs::write(&path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) },
        },
        None => Outcome { code, stdout: text, stderr: String::new() },
    }
}

/// Usage and parse problems; these exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Usage(String),
}

type Dispatch = Result<(Report, Option<PathBuf>), UsageError>;

pub fn dispatch(cmd: &Command) -> Dispatch {
    match cmd {
        Command::Validate(a) => with_module("validate", a, cmd_validate),
        Command::Roundtrip(a) => with_module("roundtrip", a, |r, m, a| cmd_roundtrip(r, m, a.cap)),
        Command::Points(a) => with_module("points", a, |r, m, _| cmd_points(r, m)),
        Command::Character(a) => with_module("character", a, |r, m, _| cmd_character(r, m)),
        Command::Gap(a) => with_module("gap", a, |r, m, _| cmd_gap(r, m)),
        Command::Ramify(a) => cmd_ramify(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Divisible(a) => with_module("divisible", &a.file, |r, m, _| cmd_divisible(r, m, a.levels)),
        Command::Embed(a) => with_module("embed", &a.file, |r, m, _| cmd_embed(r, m, a.level)),
        Command::Sh(a) => {
            let flavor = match a.flavor.as_deref() {
                None => None,
                Some("e1") => Some(ShFlavor::E1),
                Some("general") => Some(ShFlavor::General),
                Some("prime") => Some(ShFlavor::Prime),
                Some(other) => return Err(UsageError::Usage(format!("unknown flavor {other:?}"))),
            };
            with_module("sh", &a.file, |r, m, _| cmd_sh(r, m, flavor))
        }
    }
}

fn load(a: &FileArgs) -> Result<LoadedModule, UsageError> {
    let mut m = load_module(&a.input, a.prec)?;
    if let Some(t) = &a.tower {
        let v = read_json(t)?;
        let tower = parse_tower(&v).map_err(|msg| {
            UsageError::Format(FormatError::Field { path: t.display().to_string(), at: "tower".into(), msg })
        })?;
        m.tower = Some(tower);
    }
    if m.c.rows() == 0 {
        return Err(UsageError::Usage(format!("{}: no module matrices (C)", a.input.display())));
    }
    Ok(m)
}

fn display_path(p: &Path) -> String {
    p.display().to_string()
}

fn with_module(
    name: &str,
    a: &FileArgs,
    body: impl FnOnce(&mut Report, &LoadedModule, &FileArgs) -> Result<(), Error>,
) -> Dispatch {
    let m = load(a)?;
    let mut r = Report::new(name, &display_path(&a.input), Some(m.base.prec()));
    describe_base(&mut r, &m);
    if let Err(e) = body(&mut r, &m, a) {
        r.fail(format!("{}: {e}", module_label(&m)));
    }
    Ok((r, a.out.clone()))
}

fn module_label(m: &LoadedModule) -> String {
    m.file.name.clone().unwrap_or_else(|| "module".into())
}

fn describe_base(r: &mut Report, m: &LoadedModule) {
    let b = &m.base;
    let f = b.field();
    r.line(format!(
        "module {}: rank {}, p = {}, q = {}, k = F_{}, e = {}",
        module_label(m),
        m.c.rows(),
        b.p(),
        b.q(),
        f.order(),
        b.e()
    ));
    r.line(format!("pi0 = {}", series_text(f, b.pi0())));
    r.set(
        "base",
        json!({
            "p": b.p(),
            "N0": b.n0(),
            "q": b.q(),
            "k_deg": f.degree(),
            "k_poly": f.modulus(),
            "e": b.e(),
            "pi0": series_json(f, b.pi0()),
        }),
    );
    r.set("name", json!(m.file.name));
    r.set("rank", json!(m.c.rows()));
}

fn validated(m: &LoadedModule) -> Result<SigmaModule, Error> {
    validate_module(&m.base, m.c.clone(), m.d.clone())
}

fn verdict_prec(v: &strictmod_core::Verdict) -> Option<i64> {
    Some(v.precision)
}

fn cmd_validate(r: &mut Report, m: &LoadedModule, _a: &FileArgs) -> Result<(), Error> {
    let f = m.base.field().clone();
    let cert = certify(&m.base, &m.c, &m.d)?;
    r.check("C and D are integral", cert.integral.holds, verdict_prec(&cert.integral));
    r.check_detail(
        "det C is nonzero",
        cert.det_nonzero.holds,
        verdict_prec(&cert.det_nonzero),
        format!("det C = {} ({:?})", series_text(&f, &cert.det), cert.det_kind),
    );
    r.check("D is nilpotent", cert.nilpotent.holds, verdict_prec(&cert.nilpotent));
    r.check("sigma(D) C = C D", cert.semilinear.holds, verdict_prec(&cert.semilinear));
    r.check("B = (D - pi0 E) C^-1 is integral", cert.strict.holds, verdict_prec(&cert.strict));
    r.check("sigma(D) - pi0 E = C B", cert.companion.holds, verdict_prec(&cert.companion));
    let violation = cert.first_violation();
    if let Some(b) = &cert.b {
        r.line("certificate B:");
        for i in 0..b.rows() {
            let row: Vec<String> = (0..b.cols()).map(|j| series_text(&f, b.get(i, j))).collect();
            r.line(format!("  [{}]", row.join(", ")));
        }
    }
    r.set("valid", json!(violation.is_none()));
    r.set("violation", json!(violation.map(|v| format!("{v:?}"))));
    r.set("det", series_json(&f, &cert.det));
    r.set("det_kind", json!(format!("{:?}", cert.det_kind)));
    r.set("B", cert.b.as_ref().map_or(Value::Null, |b| matrix_json(&f, b)));
    if violation.is_none() {
        let sm = validated(m)?;
        r.set("nilpotency_index", json!(sm.nilpotency_index()));
        r.set("etale", json!(residue_is_etale(&sm)));
        r.set("local", json!(residue_is_local(&sm)));
        r.line(format!("valid; [pi0]-nilpotency index {}", sm.nilpotency_index()));
    } else if let Some(v) = violation {
        r.line(format!("not a valid module: {v}"));
    }
    Ok(())
}

fn cmd_roundtrip(r: &mut Report, m: &LoadedModule, cap: Option<u64>) -> Result<(), Error> {
    let sm = validated(m)?;
    let cap = cap.or(m.option_u64("cap")).unwrap_or(DEFAULT_SIZE_CAP);
    let alg = build_residue_algebra(&sm, cap)?;
    let f = alg.field().clone();
    r.line(format!("residue algebra of dimension {} (cap {cap})", alg.dim()));
    r.check("comultiplication is coassociative", alg.check_coassociative(), None);
    r.check("comultiplication is an algebra map", alg.check_multiplicative(), None);
    r.check("counit identities", alg.check_counit(), None);
    let rt = alg.roundtrip()?;
    r.check("recovered Frobenius: C_rec W = sigma(W) Cbar", rt.frobenius_matches, None);
    r.check("recovered [pi0]: D_rec W = W Dbar", rt.pi0_matches, None);
    r.check("[pi0] respects the defining relations", rt.pi0_respects_relations, None);
    r.check_detail(
        "primitive kernel has dimension n N0",
        rt.kernel_dim == rt.expected_kernel_dim,
        None,
        format!("{} vs {}", rt.kernel_dim, rt.expected_kernel_dim),
    );
    r.set("dim", json!(alg.dim()));
    r.set("cap", json!(cap));
    r.set("W", kmat_json(&f, &rt.w));
    r.set("C_rec", kmat_json(&f, &rt.c_rec));
    r.set("D_rec", kmat_json(&f, &rt.d_rec));
    r.set("kernel_dim", json!(rt.kernel_dim));
    Ok(())
}

/// The given tower, or the first `suggest_tame_tower(q, n)` (`n = 1..rank`)
/// that yields every point.
pub fn solve_auto(sys: &EquationSystem, given: Option<&ExtensionTower>, prec: i64, rank: usize) -> Result<PointSet, Error> {
    if let Some(t) = given {
        return solve_points(sys, t, prec);
    }
    let q = sys.base.q();
    let mut last = None;
    for n in 1..=rank.max(1) as u32 {
        match solve_points(sys, &suggest_tame_tower(q, n), prec) {
            Ok(p) => return Ok(p),
            Err(e @ Error::TowerInsufficient { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Unsupported("no tower tried".into())))
}

fn point_checks(r: &mut Report, sys: &EquationSystem, pts: &PointSet) -> Result<(), Error> {
    let q = sys.base.q();
    r.check_detail(
        "point count is q^{hN}",
        pts.points.len() as u64 == pts.expected,
        Some(pts.prec),
        format!("{} of {}", pts.points.len(), pts.expected),
    );
    r.check("points form an F_q-space", pts.is_fq_space(q), Some(pts.verified_prec));
    r.check("points are permuted by w -> zeta w", pts.galois_stable(sys)?, Some(pts.verified_prec));
    Ok(())
}

fn points_json(pts: &PointSet) -> Value {
    let f = pts.field.field().clone();
    Value::Array(
        pts.points
            .iter()
            .map(|p| Value::Array(p.coords.iter().map(|s| series_json(&f, s)).collect()))
            .collect(),
    )
}

fn tower_summary(r: &mut Report, pts: &PointSet, p: u32) -> Result<Q, Error> {
    let t = &pts.field.tower;
    let phi = t.herbrand(p)?;
    let brk = max_break(&phi);
    r.line(format!(
        "tower {}: E = {}, f = {}, upper break {}",
        tower_json(t),
        t.ramification_index(),
        t.residue_degree(),
        brk
    ));
    r.set("tower", tower_json(t));
    r.set("E", json!(t.ramification_index()));
    r.set("tower_break", json!(brk.to_string()));
    Ok(brk)
}

fn cmd_points(r: &mut Report, m: &LoadedModule) -> Result<(), Error> {
    let sm = validated(m)?;
    let sys = build_equations(&sm)?;
    r.line(format!("equation system: h = {}, N = {}", sys.h, sys.levels));
    let pts = solve_auto(&sys, m.tower.as_ref(), m.base.prec(), sm.rank())?;
    let brk = tower_summary(r, &pts, m.base.p())?;
    point_checks(r, &sys, &pts)?;
    let bound = theorem5_check(m.base.e(), sys.levels as i64, m.base.q() as i64, brk)?;
    r.check_detail("tower break within the ramification bound", bound.holds, None, format!("{} <= {}", brk, bound.bound));
    r.set("h", json!(sys.h));
    r.set("N", json!(sys.levels));
    r.set("count", json!(pts.points.len()));
    r.set("verified_prec", json!(pts.verified_prec));
    r.set("points", points_json(&pts));
    Ok(())
}

fn cmd_character(r: &mut Report, m: &LoadedModule) -> Result<(), Error> {
    let sm = validated(m)?;
    let ch = tame_character(&sm)?;
    let q = m.base.q();
    r.line(format!(
        "digits {:?} along the cycle {:?}; a = {} (mod q^N - 1: {})",
        ch.digits, ch.cycle, ch.exponent, ch.exponent_mod
    ));
    r.line(format!("realized exponents along the cycle: {:?}", ch.realized));
    if !ch.exponent_realized {
        r.line("note: a is not in the q-orbit of the realized exponents (digits read in the other direction)");
    }
    r.check("digits lie in [0, e]", ch.digits_in_range, None);
    r.check("digit range agrees with strictness", ch.consistent(), None);
    let sys = build_equations(&sm)?;
    let tower = m.tower.clone().unwrap_or_else(|| suggest_tame_tower(q, ch.level));
    let pts = solve_points(&sys, &tower, m.base.prec())?;
    tower_summary(r, &pts, m.base.p())?;
    point_checks(r, &sys, &pts)?;
    r.check("points have the shape beta w^{b_i E/(q^N-1)}", points_match_character(&pts, &ch, q), Some(pts.verified_prec));
    r.set("level", json!(ch.level));
    r.set("digits", json!(ch.digits));
    r.set("cycle", json!(ch.cycle));
    r.set("exponent", json!(ch.exponent));
    r.set("exponent_mod", json!(ch.exponent_mod));
    r.set("realized", json!(ch.realized));
    r.set("exponent_realized", json!(ch.exponent_realized));
    r.set("trivial", json!(ch.is_trivial()));
    r.set("points", points_json(&pts));
    Ok(())
}

fn cmd_gap(r: &mut Report, m: &LoadedModule) -> Result<(), Error> {
    let sm = validated(m)?;
    let sys = build_equations(&sm)?;
    let pts = solve_auto(&sys, m.tower.as_ref(), m.base.prec(), sm.rank())?;
    tower_summary(r, &pts, m.base.p())?;
    point_checks(r, &sys, &pts)?;
    let e = m.base.e();
    let q = m.base.q();
    let bound = Q::new(e, q as i64 - 1);
    if pts.points.len() < 2 {
        r.line("fewer than two points: no gap");
        r.set("gap", Value::Null);
    } else {
        let gap = min_pairwise_gap(&pts)?;
        r.line(format!("minimal gap {gap} (bound e/(q-1) = {bound})"));
        r.check_detail("gap <= e/(q-1)", gap_within_bound(gap, e, q), Some(pts.verified_prec), format!("{gap} <= {bound}"));
        r.set("gap", json!(gap.to_string()));
        r.set("attains_bound", json!(gap == bound));
    }
    r.set("bound", json!(bound.to_string()));
    Ok(())
}

fn cmd_ramify(a: &FileArgs) -> Dispatch {
    let v = read_json(&a.input)?;
    let path = display_path(&a.input);
    let p = v
        .get("p")
        .and_then(Value::as_u64)
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| UsageError::Usage(format!("{path}: missing p")))?;
    let tower_src = match &a.tower {
        Some(t) => read_json(t)?,
        None => v.get("tower").cloned().ok_or_else(|| UsageError::Usage(format!("{path}: no tower")))?,
    };
    let tower = parse_tower(&tower_src)
        .map_err(|msg| UsageError::Format(FormatError::Field { path: path.clone(), at: "tower".into(), msg }))?;
    let module = if v.get("C").is_some() { Some(load(a)?) } else { None };
    let mut r = Report::new("ramify", &path, module.as_ref().map(|m| m.base.prec()));
    if let Some(m) = &module {
        describe_base(&mut r, m);
    }
    let res = (|| -> Result<(), Error> {
        tower.check(p)?;
        let phi = tower.herbrand(p)?;
        let brk = max_break(&phi);
        r.line(format!("tower {}: E = {}, f = {}", tower_json(&tower), tower.ramification_index(), tower.residue_degree()));
        let breaks: Vec<String> = phi.breaks().iter().map(ToString::to_string).collect();
        let slopes: Vec<String> = phi.slopes().iter().map(ToString::to_string).collect();
        r.line(format!("Herbrand function: breaks {breaks:?}, slopes {slopes:?}; upper break {brk}"));
        r.check("Herbrand shape (unit-fraction slopes, concave)", phi.is_herbrand() && phi.is_concave(), None);
        r.set("tower", tower_json(&tower));
        r.set("breaks", json!(breaks));
        r.set("slopes", json!(slopes));
        r.set("upper_break", json!(brk.to_string()));
        if let Some(m) = &module {
            let sm = validated(m)?;
            let n = sm.nilpotency_index().max(1) as i64;
            let chk = theorem5_check(m.base.e(), n, m.base.q() as i64, brk)?;
            r.check_detail("upper break within e(N + 1/(q-1)) - 1", chk.holds, None, format!("{} <= {}", brk, chk.bound));
            r.set("bound", json!(chk.bound.to_string()));
        }
        Ok(())
    })();
    if let Err(e) = res {
        r.fail(e.to_string());
    }
    Ok((r, a.out.clone()))
}

pub fn parse_rational(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let d: i64 = d.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if d == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

fn cmd_bound(a: &BoundArgs) -> Dispatch {
    let mut e = None;
    let mut n = None;
    let mut q = None;
    for kv in &a.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| UsageError::Usage(format!("expected key=value, got {kv:?}")))?;
        let v: i64 = v.parse().map_err(|_| UsageError::Usage(format!("{k}: not an integer")))?;
        match k {
            "e" => e = Some(v),
            "N" => n = Some(v),
            "q" => q = Some(v),
            _ => return Err(UsageError::Usage(format!("unknown parameter {k:?}"))),
        }
    }
    let (Some(e), Some(n), Some(q)) = (e, n, q) else {
        return Err(UsageError::Usage("bound needs e=, N= and q=".into()));
    };
    let brk = a.brk.as_deref().map(parse_rational).transpose().map_err(UsageError::Usage)?;
    let label = format!("e={e} N={n} q={q}");
    let mut r = Report::new("bound", &label, None);
    match theorem5_check(e, n, q, brk.unwrap_or(Q::from_integer(0))) {
        Ok(chk) => {
            r.line(format!("bound e(N + 1/(q-1)) - 1 = {}", chk.bound));
            r.set("bound", json!(chk.bound.to_string()));
            r.set("e", json!(e));
            r.set("N", json!(n));
            r.set("q", json!(q));
            if let Some(b) = brk {
                r.check_detail("measured break within the bound", chk.holds, None, format!("{b} <= {}", chk.bound));
                r.set("break", json!(b.to_string()));
            }
        }
        Err(err) => r.fail(err.to_string()),
    }
    if let (Some(alpha), Some(v)) = (&a.alpha, &a.v) {
        let alpha = parse_rational(alpha).map_err(UsageError::Usage)?;
        let v = parse_rational(v).map_err(UsageError::Usage)?;
        match prop7_step(v, alpha, q) {
            Ok(w) => {
                r.line(format!("contraction step at v = {v}, alpha = {alpha}: {w}"));
                if v > alpha {
                    r.check_detail("step is strictly below v", w < v, None, format!("{w} < {v}"));
                }
                r.set("step", json!(w.to_string()));
            }
            Err(err) => r.fail(err.to_string()),
        }
    }
    Ok((r, a.out.clone()))
}

fn cmd_divisible(r: &mut Report, m: &LoadedModule, levels: Option<usize>) -> Result<(), Error> {
    let sm = validated(m)?;
    let levels = levels.or(m.option_u64("levels").map(|x| x as usize)).unwrap_or(3);
    let (t, _) = build_tower_n1(&sm, levels)?;
    let rep = verify_divisible(&t);
    r.line(format!("tower with {} levels, ranks {:?}", t.levels.len(), t.levels.iter().map(|l| l.rank()).collect::<Vec<_>>()));
    for c in &rep.checks {
        r.check(&format!("level {}: {}", c.level, c.name), c.verdict.holds, Some(c.verdict.precision));
    }
    if let Some(w) = &rep.warning {
        r.line(format!("warning: {w}"));
    }
    r.set("levels", json!(t.levels.len()));
    r.set("ranks", json!(t.levels.iter().map(|l| l.rank()).collect::<Vec<_>>()));
    r.set("layout", json!(t.layout));
    Ok(())
}

fn route_name(r: EmbedRoute) -> &'static str {
    match r {
        EmbedRoute::SelfTower => "self_tower",
        EmbedRoute::DualSelfTower => "dual_self_tower",
        EmbedRoute::DualClassical => "dual_classical",
    }
}

fn cmd_embed(r: &mut Report, m: &LoadedModule, level: Option<usize>) -> Result<(), Error> {
    let sm = validated(m)?;
    let n = level.or(m.option_u64("level").map(|x| x as usize)).unwrap_or_else(|| sm.nilpotency_index().max(1));
    let emb = embed_into_divisible(&sm, n)?;
    let f = m.base.field().clone();
    r.line(format!("embedded into level {} via {}", emb.level, route_name(emb.route)));
    for c in &emb.report.checks {
        r.check(&format!("tower level {}: {}", c.level, c.name), c.verdict.holds, Some(c.verdict.precision));
    }
    r.check("embedding is a morphism", strictmod_core::modcat::hom_check(&emb.map).holds(), None);
    r.check("embedding is pure", emb.pure.holds, Some(emb.pure.precision));
    r.set("level", json!(emb.level));
    r.set("route", json!(route_name(emb.route)));
    r.set("map", matrix_json(&f, emb.map.matrix()));
    r.set("target_rank", json!(emb.map.target().rank()));
    Ok(())
}

fn cmd_sh(r: &mut Report, m: &LoadedModule, flavor: Option<ShFlavor>) -> Result<(), Error> {
    let sm = validated(m)?;
    let flavors = match flavor {
        Some(f) => vec![f],
        None => applicable_flavors(&sm),
    };
    if flavors.is_empty() {
        let (e, q) = (m.base.e(), m.base.q());
        let why = if !sm.d().is_zero().holds {
            "[pi0] must act by zero (D = 0)".to_string()
        } else {
            format!("every flavor needs e = 1 or e <= q - 1, here e = {e}, q = {q}")
        };
        return Err(Error::Precondition(format!("no flavor applies: {why}")));
    }
    let mut objs = serde_json::Map::new();
    for fl in flavors {
        let o = sh(&sm, fl)?;
        let f = o.field().clone();
        let ax = o.axioms();
        let func = check_functoriality(&ModuleHom::identity(&sm), fl)?;
        r.line(format!(
            "{}: ambient dimension {}, Mbar dimension {}, M^1 dimension {}",
            fl.name(),
            o.dim,
            o.m_bar.rows,
            o.m1.rows
        ));
        r.check(&format!("{}: spanning axiom", fl.name()), ax.spanning, None);
        r.check(&format!("{}: M^1 = Ker phi_0", fl.name()), ax.m1_is_kernel, None);
        r.check(&format!("{}: identity is functorial", fl.name()), func.holds(), None);
        if !ax.kernel_of_pi {
            r.line(format!("{}: note: M mod pi M is not the kernel of pi on Mbar", fl.name()));
        }
        objs.insert(
            fl.name().into(),
            json!({
                "jmin": o.jmin,
                "dim": o.dim,
                "pi_action": kmat_json(&f, &o.pi_action),
                "m_bar": kmat_json(&f, &o.m_bar),
                "m0": kmat_json(&f, &o.m0),
                "m1": kmat_json(&f, &o.m1),
                "phi0": kmat_json(&f, &o.phi0),
                "phi1": kmat_json(&f, &o.phi1),
                "kernel_of_pi": ax.kernel_of_pi,
            }),
        );
    }
    r.set("objects", Value::Object(objs));
    Ok(())
}
