use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lpgpd::bratteli::{af_norm, embed, BratteliDiagram, BratteliFile, TowerElement};
use lpgpd::convolution::{convolve, i_norm, AlgebraElement};
use lpgpd::cuntz::{cuntz_semilattice, leavitt_norm_bounds, Basepoint, Word};
use lpgpd::groupoid::io::parse_document;
use lpgpd::groupoid::generate_slice_semigroup;
use lpgpd::linalg::{matrix_from_json, op_norm, NormConfig};
use lpgpd::measure::{cocycle, MeasureFile, ObjectMeasure};
use lpgpd::representation::{
    disintegrate, ind_matrix_at, ind_matrix_measure, integrate, reduced_norm, validate_rep, BundleFile,
    BundleRepresentation, DEFAULT_DISINTEGRATION_TOL,
};
use lpgpd::semigroup::{is_tight_semilattice, is_tight_spatial, rho_from_pi, DEFAULT_TIGHT_CAP};
use lpgpd::{FiniteGroupoid, Slice};
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::expr::{self, ExprError, GroupoidContext};
use crate::report::{self, ErrorInfo, Report};

/// Largest idempotent semilattice handed to the spatial tightness check.
const SPATIAL_TIGHT_CAP: usize = 64;
const SLICE_SEMIGROUP_CAP: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "lpgpd", version, about = "Finite groupoid algebras on weighted l^p spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Args)]
pub struct Opts {
    /// Exponent in (1, inf). Defaults to the representation file's, else 2.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random starts of the norm estimator.
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-iter", global = true, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Cache directory for norm results.
    #[arg(long, global = true, env = "LPGPD_CACHE")]
    pub cache: Option<PathBuf>,
    #[arg(long = "no-cache", global = true)]
    pub no_cache: bool,
    #[arg(short = 'g', long, global = true)]
    pub groupoid: Option<PathBuf>,
    #[arg(short = 'm', long, global = true)]
    pub measure: Option<PathBuf>,
    #[arg(short = 'e', long = "expr", global = true, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Number of Leavitt generators.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Truncation budget.
    #[arg(long = "maxN", global = true)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the groupoid axioms, and quasi-invariance when a measure is given.
    Validate,
    /// I-norm of an element.
    Inorm,
    /// Evaluate an expression, optionally convolved on the right with another.
    Convolve {
        #[arg(long, allow_hyphen_values = true)]
        with: Option<String>,
    },
    /// Radon-Nikodym cocycle of a measure.
    Cocycle,
    /// Reduced norm, maximized over base points.
    Rednorm,
    /// Matrix and norm of an induced representation.
    Ind {
        /// Base point; otherwise the measure given with -m.
        #[arg(long)]
        at: Option<String>,
    },
    /// Integrated form of a bundle representation.
    Integrate {
        #[arg(short = 'r', long)]
        rep: PathBuf,
    },
    /// Tightness of the Cuntz cylinder semilattice (--d, --maxN) or of the
    /// slice representation of a bundle representation (-g, -r).
    Tight {
        #[arg(short = 'r', long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Recover a bundle representation from its slice representation.
    Disintegrate {
        #[arg(short = 'r', long)]
        rep: PathBuf,
    },
    /// Lower bounds on the norm of a Leavitt polynomial.
    #[command(name = "cuntz-bound")]
    CuntzBound {
        /// Eventually periodic base point `prefix:period`, e.g. `:0` or `01:1`.
        #[arg(long = "basepoint")]
        basepoints: Vec<String>,
    },
    /// Multiplicities of a Bratteli diagram and norms of tower elements.
    Bratteli {
        /// Diagram file; alternatively --kind.
        #[arg(short = 'b', long)]
        diagram: Option<PathBuf>,
        /// `fibonacci`, `uhf` or `chain`.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// `{"level": k, "blocks": [matrix, ...]}`.
        #[arg(long)]
        element: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Inorm => "inorm",
            Command::Convolve { .. } => "convolve",
            Command::Cocycle => "cocycle",
            Command::Rednorm => "rednorm",
            Command::Ind { .. } => "ind",
            Command::Integrate { .. } => "integrate",
            Command::Tight { .. } => "tight",
            Command::Disintegrate { .. } => "disintegrate",
            Command::CuntzBound { .. } => "cuntz-bound",
            Command::Bratteli { .. } => "bratteli",
        }
    }
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: unreadable or malformed files, syntax errors, unknown names.
    Parse(String),
    /// Well-formed input on which the computation is not defined or fails.
    Domain(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 3,
            Failure::Domain(_) => 2,
        }
    }
}

impl From<lpgpd::Error> for Failure {
    fn from(e: lpgpd::Error) -> Self {
        match e {
            lpgpd::Error::Format(_) | lpgpd::Error::Unknown { .. } => Failure::Parse(e.to_string()),
            e => Failure::Domain(e.to_string()),
        }
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Library(e) => e.into(),
            e => Failure::Parse(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Parse(e.to_string())
    }
}

/// What a command produced. `ok = false` means the report is complete but
/// records a domain failure (e.g. axiom violations).
struct Outcome {
    result: Value,
    witness: Option<Value>,
    residual: Option<f64>,
    ok: bool,
    cached: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self { result, witness: None, residual: None, ok: true, cached: false }
    }
}

struct Ctx<'a> {
    opts: &'a Opts,
    cache: Cache,
    inputs: BTreeMap<String, Value>,
    /// Contents of every file read, for cache keys.
    contents: BTreeMap<String, String>,
    /// Exponent actually used, if any.
    p: Option<f64>,
}

impl<'a> Ctx<'a> {
    fn read(&mut self, role: &str, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
        self.inputs.insert(role.to_string(), json!(path.display().to_string()));
        self.contents.insert(role.to_string(), text.clone());
        Ok(text)
    }

    fn groupoid(&mut self) -> Result<(Arc<FiniteGroupoid>, BTreeMap<String, Vec<String>>), Failure> {
        let path = self.opts.groupoid.clone().ok_or_else(|| Failure::Parse("missing -g/--groupoid".into()))?;
        let doc = parse_document(&self.read("groupoid", &path)?)?;
        Ok((Arc::new(doc.groupoid), doc.slices))
    }

    fn expr_text(&mut self) -> Result<String, Failure> {
        let src = self.opts.expr.clone().ok_or_else(|| Failure::Parse("missing -e/--expr".into()))?;
        self.inputs.insert("expr".into(), json!(src));
        Ok(src)
    }

    fn element(&mut self) -> Result<(GroupoidContext, AlgebraElement<f64>), Failure> {
        let (g, slices) = self.groupoid()?;
        let ctx = GroupoidContext::new(g, &slices)?;
        let e = expr::parse(&self.expr_text()?)?;
        let f = ctx.eval(&e)?;
        Ok((ctx, f))
    }

    fn measure(&mut self, g: &FiniteGroupoid) -> Result<Option<ObjectMeasure<f64>>, Failure> {
        let Some(path) = self.opts.measure.clone() else { return Ok(None) };
        let file: MeasureFile = serde_json::from_str(&self.read("measure", &path)?)?;
        Ok(Some(file.to_measure(g)?))
    }

    fn rep(&mut self, path: &Path, g: &Arc<FiniteGroupoid>) -> Result<BundleRepresentation<f64>, Failure> {
        let file: BundleFile = serde_json::from_str(&self.read("rep", path)?)?;
        let r = file.to_rep(g, self.opts.p)?;
        self.p = Some(r.p());
        let problems = validate_rep(&r);
        if !problems.is_empty() {
            return Err(Failure::Domain(format!("invalid representation: {}", problems.join("; "))));
        }
        Ok(r)
    }

    fn p(&mut self) -> f64 {
        *self.p.get_or_insert(self.opts.p.unwrap_or(2.0))
    }

    fn cfg(&self) -> NormConfig {
        NormConfig {
            restarts: self.opts.restarts,
            tol: self.opts.tol.unwrap_or(NormConfig::default().tol),
            max_iter: self.opts.max_iter,
            seed: self.opts.seed,
        }
    }

    /// Looks up `(command, inputs, p, cfg, extra)` in the cache, computing
    /// and storing on a miss.
    fn cached(
        &self,
        command: &str,
        p: f64,
        extra: Value,
        compute: impl FnOnce() -> Result<Outcome, Failure>,
    ) -> Result<Outcome, Failure> {
        let key = Cache::key(&json!({
            "command": command,
            "contents": self.contents,
            "inputs": self.inputs.get("expr"),
            "p": p,
            "cfg": self.cfg(),
            "extra": extra,
        }));
        if let Some(hit) = self.cache.get(&key) {
            if let Some(result) = hit.get("result") {
                let witness = hit.get("witness").filter(|w| !w.is_null()).cloned();
                return Ok(Outcome { result: result.clone(), witness, residual: None, ok: true, cached: true });
            }
        }
        let out = compute()?;
        if out.ok {
            self.cache.put(&key, &json!({"result": out.result, "witness": out.witness}));
        }
        Ok(out)
    }
}

fn coeffs(f: &AlgebraElement<f64>) -> Value {
    Value::Object(
        f.to_labels()
            .into_iter()
            .filter(|(_, z)| z.norm() != 0.0)
            .map(|(k, z)| (k, report::complex(z)))
            .collect(),
    )
}

fn parse_word(s: &str) -> Result<Word, Failure> {
    s.chars()
        .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Failure::Parse(format!("bad letter `{c}` in base point"))))
        .collect()
}

fn parse_basepoint(s: &str) -> Result<Basepoint, Failure> {
    let (prefix, period) = s.split_once(':').ok_or_else(|| Failure::Parse(format!("base point `{s}` is not prefix:period")))?;
    Ok(Basepoint::new(parse_word(prefix)?, parse_word(period)?)?)
}

fn check_opts(opts: &Opts) -> Result<(), Failure> {
    if let Some(p) = opts.p {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Failure::Parse(format!("--p {p}: the exponent must lie in (1, inf)")));
        }
    }
    if opts.restarts < 1 {
        return Err(Failure::Parse("--restarts must be at least 1".into()));
    }
    if let Some(t) = opts.tol {
        if !(t > 0.0) {
            return Err(Failure::Parse("--tol must be positive".into()));
        }
    }
    Ok(())
}

fn execute(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome, Failure> {
    match cmd {
        Command::Validate => {
            let (g, _) = ctx.groupoid()?;
            let violations = g.validate();
            let mut result = json!({
                "valid": violations.is_empty(),
                "objects": g.num_objects(),
                "arrows": g.num_arrows(),
                "violations": violations,
            });
            let mut ok = violations.is_empty();
            if ok {
                if let Some(mu) = ctx.measure(&g)? {
                    let qi = cocycle(&g, &mu);
                    result["quasi_invariant"] = json!(qi.is_ok());
                    if let Err(e) = qi {
                        result["measure_error"] = json!(e.to_string());
                        ok = false;
                    }
                }
            }
            Ok(Outcome { ok, ..Outcome::ok(result) })
        }
        Command::Inorm => {
            let (_, f) = ctx.element()?;
            Ok(Outcome::ok(json!({ "i_norm": i_norm(&f) })))
        }
        Command::Convolve { with } => {
            let (gc, mut f) = ctx.element()?;
            if let Some(src) = with {
                ctx.inputs.insert("with".into(), json!(src));
                f = convolve(&f, &gc.eval(&expr::parse(src)?)?)?;
            }
            Ok(Outcome::ok(json!({ "coeffs": coeffs(&f), "i_norm": i_norm(&f) })))
        }
        Command::Cocycle => {
            let (g, _) = ctx.groupoid()?;
            let mu = ctx.measure(&g)?.ok_or_else(|| Failure::Parse("missing -m/--measure".into()))?;
            let d = cocycle(&g, &mu)?;
            let values: serde_json::Map<String, Value> =
                g.arrows().map(|a| (g.arrow_label(a).to_string(), json!(d.get(a)))).collect();
            let violations = d.violations(&g, 1e-12);
            let ok = violations.is_empty();
            Ok(Outcome { ok, ..Outcome::ok(json!({ "D": values, "chain_rule_violations": violations })) })
        }
        Command::Rednorm => {
            let (_, f) = ctx.element()?;
            let (p, cfg) = (ctx.p(), ctx.cfg());
            let g = f.groupoid().clone();
            ctx.cached("rednorm", p, Value::Null, || {
                let r = reduced_norm(&f, p, &cfg)?;
                Ok(Outcome {
                    witness: Some(report::vector(&r.estimate.witness)),
                    ..Outcome::ok(json!({
                        "value": r.estimate.value,
                        "basepoint": g.object_label(r.basepoint),
                        "converged": r.estimate.converged,
                        "i_norm": i_norm(&f),
                    }))
                })
            })
        }
        Command::Ind { at } => {
            let (_, f) = ctx.element()?;
            let g = f.groupoid().clone();
            let p = ctx.p();
            let op = match at {
                Some(x) => {
                    ctx.inputs.insert("at".into(), json!(x));
                    ind_matrix_at(&f, g.find_object(x)?, p)?
                }
                None => {
                    let mu = ctx
                        .measure(&g)?
                        .ok_or_else(|| Failure::Parse("ind needs --at <object> or -m <measure>".into()))?;
                    ind_matrix_measure(&f, &mu, p)?
                }
            };
            let cfg = ctx.cfg();
            ctx.cached("ind", p, json!(at), || {
                let est = op_norm(&op, &cfg)?;
                Ok(Outcome {
                    witness: Some(report::vector(&est.witness)),
                    ..Outcome::ok(json!({
                        "matrix": report::matrix(op.matrix()),
                        "weights": op.dom().weights(),
                        "norm": est.value,
                        "converged": est.converged,
                    }))
                })
            })
        }
        Command::Integrate { rep } => {
            let (gc, f) = ctx.element()?;
            let r = ctx.rep(rep, &gc.groupoid)?;
            let p = r.p();
            let cfg = ctx.cfg();
            ctx.cached("integrate", p, Value::Null, || {
                let pi = integrate(&r, &f)?;
                let est = op_norm(&pi.operator, &cfg)?;
                let g = &gc.groupoid;
                let bound = i_norm(&f);
                Ok(Outcome {
                    witness: Some(report::vector(&est.witness)),
                    ..Outcome::ok(json!({
                        "matrix": report::matrix(pi.operator.matrix()),
                        "blocks": pi.layout.objects.iter().zip(&pi.layout.offsets)
                            .map(|(&x, &o)| json!([g.object_label(x), o])).collect::<Vec<_>>(),
                        "weights": pi.layout.space.weights(),
                        "norm": est.value,
                        "i_norm": bound,
                        "contractive": est.value <= bound * (1.0 + 1e-9) + 1e-12,
                    }))
                })
            })
        }
        Command::Tight { rep, cap } => match rep {
            Some(path) => {
                let (g, _) = ctx.groupoid()?;
                let r = ctx.rep(path, &g)?;
                let gens: Vec<Slice> = g.arrows().map(Slice::singleton).collect();
                let sigma = generate_slice_semigroup(&g, &gens, SLICE_SEMIGROUP_CAP)?;
                let rho = rho_from_pi(|f| Ok(integrate(&r, f)?.operator), &sigma)?;
                let report = is_tight_spatial(&rho, cap.unwrap_or(SPATIAL_TIGHT_CAP))?;
                Ok(Outcome::ok(json!({ "semigroup_size": sigma.len(), "report": report })))
            }
            None => {
                let d = ctx.opts.d.ok_or_else(|| Failure::Parse("tight needs -r or --d".into()))?;
                let n = ctx.opts.max_n.ok_or_else(|| Failure::Parse("tight needs --maxN with --d".into()))?;
                ctx.inputs.insert("d".into(), json!(d));
                ctx.inputs.insert("maxN".into(), json!(n));
                let cs = cuntz_semilattice(d, n)?;
                let report = is_tight_semilattice(&cs.beta, cap.unwrap_or(DEFAULT_TIGHT_CAP))?;
                Ok(Outcome::ok(json!({
                    "semilattice_size": cs.words.len() + 1,
                    "leaves": cs.leaves.len(),
                    "cover_criterion": cs.satisfies_cover_criterion(),
                    "report": report,
                })))
            }
        },
        Command::Disintegrate { rep } => {
            let (g, _) = ctx.groupoid()?;
            let r = ctx.rep(rep, &g)?;
            let gens: Vec<Slice> = g.arrows().map(Slice::singleton).collect();
            let sigma = generate_slice_semigroup(&g, &gens, SLICE_SEMIGROUP_CAP)?;
            let rho = rho_from_pi(|f| Ok(integrate(&r, f)?.operator), &sigma)?;
            let d = disintegrate(&rho, &sigma, ctx.opts.tol.unwrap_or(DEFAULT_DISINTEGRATION_TOL))?;
            let recovered = BundleFile::from_rep(&d.rep);
            Ok(Outcome {
                residual: Some(d.residual),
                ..Outcome::ok(json!({
                    "q": d.q.iter().map(|&x| g.object_label(x)).collect::<Vec<_>>(),
                    "mu": d.mu.to_labels(&g),
                    "rep": recovered,
                }))
            })
        }
        Command::CuntzBound { basepoints } => {
            let d = ctx.opts.d.ok_or_else(|| Failure::Parse("missing --d".into()))?;
            let max_n = ctx.opts.max_n.ok_or_else(|| Failure::Parse("missing --maxN".into()))?;
            let src = ctx.expr_text()?;
            let e = expr::parse(&src)?;
            let f = expr::eval_leavitt(&e, d)?;
            let points = if basepoints.is_empty() {
                vec![Basepoint::constant(0)]
            } else {
                basepoints.iter().map(|s| parse_basepoint(s)).collect::<Result<_, _>>()?
            };
            ctx.inputs.insert("d".into(), json!(d));
            ctx.inputs.insert("maxN".into(), json!(max_n));
            let (p, cfg) = (ctx.p(), ctx.cfg());
            let extra = json!({ "d": d, "maxN": max_n, "basepoints": points });
            ctx.cached("cuntz-bound", p, extra, || {
                let b = leavitt_norm_bounds(&f, p, max_n, &points, &cfg)?;
                Ok(Outcome::ok(json!({
                    "expression": e.to_string(),
                    "lower": b.lower,
                    "upper": b.upper,
                    "lower_bound_only": true,
                })))
            })
        }
        Command::Bratteli { diagram, kind, n, levels, element } => {
            let dg = match (diagram, kind.as_deref()) {
                (Some(path), _) => {
                    let file: BratteliFile = serde_json::from_str(&ctx.read("diagram", path)?)?;
                    BratteliDiagram::from_file(&file)?
                }
                (None, Some("fibonacci")) => BratteliDiagram::fibonacci(*levels),
                (None, Some("uhf")) => BratteliDiagram::uhf(*n, *levels),
                (None, Some("chain")) => BratteliDiagram::chain(*levels),
                (None, Some(other)) => return Err(Failure::Parse(format!("unknown diagram kind `{other}`"))),
                (None, None) => return Err(Failure::Parse("bratteli needs -b <file> or --kind".into())),
            };
            if diagram.is_none() {
                ctx.inputs.insert("kind".into(), json!(kind));
                ctx.inputs.insert("levels".into(), json!(levels));
                ctx.inputs.insert("n".into(), json!(n));
            }
            let mults = (0..dg.num_levels()).map(|k| dg.multiplicities(k)).collect::<Result<Vec<_>, _>>()?;
            let mut result = json!({ "levels": dg.to_file().levels, "multiplicities": mults });
            let Some(path) = element else { return Ok(Outcome::ok(result)) };
            let file: Value = serde_json::from_str(&ctx.read("element", path)?)?;
            let level = file
                .get("level")
                .and_then(Value::as_u64)
                .ok_or_else(|| Failure::Parse("element needs an integer `level`".into()))? as usize;
            let blocks: Vec<Vec<Vec<[f64; 2]>>> = serde_json::from_value(
                file.get("blocks").cloned().ok_or_else(|| Failure::Parse("element needs `blocks`".into()))?,
            )?;
            let blocks = blocks.iter().map(|b| matrix_from_json(b)).collect::<Result<Vec<_>, _>>()?;
            let a = TowerElement::new(&dg, level, blocks)?;
            let (p, cfg) = (ctx.p(), ctx.cfg());
            let extra = json!({ "kind": kind, "levels": levels, "n": n });
            let norms = ctx.cached("bratteli", p, extra, || {
                let mut norms = vec![json!([level, af_norm(&a, p, &cfg)?])];
                let mut cur = a.clone();
                while cur.level() + 1 < dg.num_levels() {
                    cur = embed(&dg, &cur)?;
                    norms.push(json!([cur.level(), af_norm(&cur, p, &cfg)?]));
                }
                Ok(Outcome::ok(json!(norms)))
            })?;
            result["norms"] = norms.result;
            Ok(Outcome { cached: norms.cached, ..Outcome::ok(result) })
        }
    }
}

/// Runs one command, returning the report and the exit code.
pub fn run(cli: &Cli) -> (Report, i32) {
    let start = Instant::now();
    let opts = &cli.opts;
    let mut report = Report::new(cli.command.name());
    let cache = if opts.no_cache {
        Cache::disabled()
    } else {
        opts.cache.clone().or_else(Cache::default_dir).map_or_else(Cache::disabled, Cache::at)
    };
    let mut ctx = Ctx { opts, cache, inputs: BTreeMap::new(), contents: BTreeMap::new(), p: None };
    let outcome = check_opts(opts).and_then(|_| execute(&cli.command, &mut ctx));
    report.inputs = ctx.inputs;
    report.p = ctx.p.or(opts.p);
    let code = match outcome {
        Ok(out) => {
            report.result = out.result;
            report.witness = out.witness;
            report.residual = out.residual;
            report.timing.cached = out.cached;
            if out.ok {
                0
            } else {
                2
            }
        }
        Err(f) => {
            let (kind, message) = match &f {
                Failure::Parse(m) => ("parse", m.clone()),
                Failure::Domain(m) => ("domain", m.clone()),
            };
            report.error = Some(ErrorInfo { kind, message });
            f.exit_code()
        }
    };
    report.timing.seconds = start.elapsed().as_secs_f64();
    (report, code)
}
