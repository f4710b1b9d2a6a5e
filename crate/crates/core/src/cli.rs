//! Command-line front end. Every command prints a JSON report on stdout.
//!
//! Exit status: 0 when the check passes, 1 when it fails or the kernel rejects the input
//! (wrong degree, membership, missing preconditions), 2 on usage or parse errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::coderivations::{exp_pi, pushforward_mc, theta_pi_pipeline, verify_pi_identities};
use crate::deformation::{
    conditions_check, gauge_act, ks_class, ks_integrability, mc_check, mc_path_check, path_split, Dgla, OmegaDgla,
    PdDgla, PvDgla,
};
use crate::dsl::eval::{Kind, Value};
use crate::dsl::session::{example_source, Session, SessionConfig};
use crate::error::Error;
use crate::forms::LOmegaElem;
use crate::grassmann::Grass;
use crate::polydiff::{ainfty_from_mc, ainfty_relations_check, PolyDiffOp, StasheffMode, Terms};
use crate::polyvectors::Polyvector;
use crate::random::Gen;

#[derive(Parser, Debug)]
#[command(name = "gradef", version, about = "Exact graded deformation calculus on symplectic R^m")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Maurer-Cartan check of the input in its carrier.
    CheckMc(Common),
    /// Gauge action of --xi on the input, with an MC certificate for the result.
    Gauge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        xi: String,
    },
    /// Kodaira-Spencer class of an operator, and the two conditions when a pair is loaded.
    Ks(Common),
    /// [kappa, kappa]_S = 0 for a polyvector, or for the KS class of an operator.
    Integrable(Common),
    /// A-infinity operations m_n read off an MC operator.
    Ainfty(Common),
    /// Stasheff relations of the A-infinity structure of an MC operator.
    Stasheff {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        arity: usize,
        #[arg(long, value_enum, default_value_t = Mode::Evaluation)]
        mode: Mode,
        /// Degree bound on test monomials in evaluation mode.
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Randomized check of the two coderivation identities for Pi at a fixture.
    PiVerify {
        #[command(flatten)]
        common: Common,
        /// Number of length-2 words; half as many length-3 words are drawn.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Pushforward of a closed suspended form through exp(Pi).
    ExpPi(Common),
    /// exp(Pi) pushforward followed by J_omega^-1, certified at both levels.
    ThetaPi(Common),
    /// MC check of a path a(t) + dt b(t), written as one expression in t and dt.
    PathCheck(Common),
    /// Membership table of a suspended form in L, L~ and the filtration steps.
    Membership(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Evaluation,
    Symbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ContextName {
    /// Polydifferential operators with the Hochschild differential.
    Pd,
    /// Polyvectors with zero differential.
    Pv,
    /// Polyvectors with differential [eps alpha, -]_S.
    PvAlpha,
    /// Suspended forms with -d and [,]_omega.
    Omega,
    /// Suspended forms with -d and zero bracket.
    OmegaZero,
}

impl ContextName {
    fn parse(s: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(s, true).ok()
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub degrees: Option<Vec<i32>>,
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps_floor: Option<i32>,
    #[arg(long = "W")]
    pub w: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long, conflicts_with = "example")]
    pub file: Option<String>,
    /// Bundled example: penkava-schwarz, moyal-r2, moyal-r4, standard2, standard4, shear4.
    #[arg(long)]
    pub example: Option<String>,
    #[arg(long, value_enum)]
    pub context: Option<ContextName>,
}

impl Common {
    fn overrides(&self) -> SessionConfig {
        SessionConfig {
            m: self.m,
            g: self.g,
            degrees: self.degrees.clone(),
            n: self.n,
            eps_floor: self.eps_floor,
            w: self.w,
            seed: self.seed,
            fixture: self.fixture.clone(),
            context: None,
        }
    }

    fn session(&self) -> Result<Session, Failure> {
        let src = match (&self.file, &self.example) {
            (Some(p), _) => std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("cannot read {p}: {e}")))?,
            (None, Some(n)) => example_source(n).map_err(Failure::from)?.to_string(),
            (None, None) => String::new(),
        };
        Ok(Session::load(&src, &self.overrides())?)
    }

    /// The session and the value under test: --expr if given, else the file's main value.
    fn input(&self) -> Result<(Session, Value), Failure> {
        let s = self.session()?;
        let v = match &self.expr {
            Some(e) => s.eval_str(e)?,
            None => match s.main_value() {
                Some((_, v)) => v.clone(),
                None => return Err(Failure::usage("no input: give --expr, --file or --example")),
            },
        };
        Ok((s, v))
    }

    fn context(&self, s: &Session, v: &Value) -> Result<ContextName, Failure> {
        if let Some(c) = self.context {
            return Ok(c);
        }
        if let Some(c) = &s.config.context {
            return ContextName::parse(c).ok_or_else(|| Failure::usage(format!("unknown context '{c}'")));
        }
        Ok(match v.kind() {
            Kind::Op => ContextName::Pd,
            Kind::Pv => ContextName::Pv,
            Kind::SForm if s.env.pair.is_some() => ContextName::Omega,
            Kind::SForm => ContextName::OmegaZero,
            k => return Err(Failure::usage(format!("no carrier for a {}; wrap forms in s(...)", k.name()))),
        })
    }
}

/// Error with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { status: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } | Error::Argument(_) | Error::Context(_) => 2,
            _ => 1,
        };
        Failure { status, msg: e.to_string() }
    }
}

enum Carrier {
    Pd(PdDgla),
    Pv(PvDgla),
    Om(OmegaDgla),
}

trait FromValue: Sized {
    fn from_value(v: Value) -> Option<Self>;
}

impl FromValue for Terms {
    fn from_value(v: Value) -> Option<Self> {
        match v.coerce(Kind::Op)? {
            Value::Op(t) => Some(t),
            _ => None,
        }
    }
}

impl FromValue for Grass {
    fn from_value(v: Value) -> Option<Self> {
        match v {
            Value::Pv(g) | Value::SForm(g) => Some(g),
            v if v.is_zero() => Some(Grass::zero()),
            Value::Scalar(p) => Some(Grass::scalar(p)),
            _ => None,
        }
    }
}

fn elem<T: FromValue>(v: &Value, want: Kind) -> Result<T, Failure> {
    let c = v.clone().coerce(want).ok_or_else(|| {
        Failure::usage(format!("the carrier holds {}, got {}", want.a_name(), v.kind().a_name()))
    })?;
    T::from_value(c).ok_or_else(|| Failure::usage("unsupported value"))
}

macro_rules! dispatch {
    ($c:expr, $l:ident, $want:ident => $body:expr) => {
        match $c {
            Carrier::Pd($l) => {
                let $want = Kind::Op;
                $body
            }
            Carrier::Pv($l) => {
                let $want = Kind::Pv;
                $body
            }
            Carrier::Om($l) => {
                let $want = Kind::SForm;
                $body
            }
        }
    };
}

fn carrier(name: ContextName, s: &Session) -> Result<Carrier, Failure> {
    let ctx = &s.env.ctx;
    let pair = s.env.pair.as_ref();
    let need = |what: &str| Failure::usage(format!("context {what} needs a symplectic pair (--fixture)"));
    Ok(match name {
        ContextName::Pd => Carrier::Pd(PdDgla::new(ctx)),
        ContextName::Pv => Carrier::Pv(PvDgla::new(ctx, None)),
        ContextName::PvAlpha => Carrier::Pv(PvDgla::new(ctx, Some(pair.ok_or_else(|| need("pv-alpha"))?))),
        ContextName::Omega => Carrier::Om(OmegaDgla::new(ctx, Some(pair.ok_or_else(|| need("omega"))?), true)),
        ContextName::OmegaZero => Carrier::Om(OmegaDgla::new(ctx, None, true)),
    })
}

fn pretty(j: &Json) -> String {
    serde_json::to_string_pretty(j).expect("json")
}

fn pass_status(p: bool) -> i32 {
    if p {
        0
    } else {
        1
    }
}

fn sform(v: &Value) -> Result<Grass, Failure> {
    elem::<Grass>(v, Kind::SForm)
}

fn operator(v: &Value, s: &Session) -> Result<PolyDiffOp, Failure> {
    Ok(PolyDiffOp::new(&s.env.ctx, elem::<Terms>(v, Kind::Op)?))
}

fn pair_of(s: &Session) -> Result<&crate::polyvectors::SymplecticPair, Failure> {
    s.env.pair.as_ref().ok_or_else(|| Failure::usage("this command needs a symplectic pair (--fixture)"))
}

/// MC certificate of a value in a named carrier (`pd`, `pv`, `pv-alpha`, `omega`, `omega-zero`),
/// defaulting by the kind of the value.
pub fn mc_report(s: &Session, v: &Value, context: Option<&str>) -> crate::Result<crate::deformation::Report> {
    let common = Common {
        context: match context {
            Some(c) => Some(ContextName::parse(c).ok_or_else(|| Error::Argument(format!("unknown context '{c}'")))?),
            None => None,
        },
        ..Common::default()
    };
    let to_err = |f: Failure| Error::Argument(f.msg);
    let car = carrier(common.context(s, v).map_err(to_err)?, s).map_err(to_err)?;
    dispatch!(&car, l, want => mc_check(&elem(v, want).map_err(to_err)?, l))
}

/// Run one command; returns the report text and the exit status.
pub fn run_command(cmd: &Cmd) -> (String, i32) {
    match run(cmd) {
        Ok(r) => r,
        Err(f) => (pretty(&json!({ "status": "error", "error": f.msg })), f.status),
    }
}

fn run(cmd: &Cmd) -> Result<(String, i32), Failure> {
    match cmd {
        Cmd::CheckMc(c) => {
            let (s, v) = c.input()?;
            let car = carrier(c.context(&s, &v)?, &s)?;
            let rep = dispatch!(&car, l, want => mc_check(&elem(&v, want)?, l)?);
            Ok((rep.json(), pass_status(rep.passed())))
        }
        Cmd::Gauge { common: c, xi } => {
            let (s, v) = c.input()?;
            let x = s.eval_str(xi)?;
            let car = carrier(c.context(&s, &v)?, &s)?;
            dispatch!(&car, l, want => {
                let out = gauge_act(&elem(&x, want)?, &elem(&v, want)?, l)?;
                let rep = mc_check(&out, l)?;
                let j = json!({ "result": l.show(&out), "certificate": serde_json::to_value(&rep).expect("json") });
                Ok((pretty(&j), pass_status(rep.passed())))
            })
        }
        Cmd::Ks(c) => {
            let (s, v) = c.input()?;
            let l = PdDgla::new(&s.env.ctx);
            let mu = elem::<Terms>(&v, Kind::Op)?;
            let ks = ks_class(&mu, &l)?;
            let mut j = json!({ "ks_class": ks.text(), "nonzero": !ks.is_zero() });
            if let Some(p) = &s.env.pair {
                let cond = conditions_check(&mu, p, &l)?;
                j["conditions"] = serde_json::to_value(&cond).expect("json");
            }
            Ok((pretty(&j), 0))
        }
        Cmd::Integrable(c) => {
            let (s, v) = c.input()?;
            let kappa = match v.kind() {
                Kind::Op => ks_class(&elem::<Terms>(&v, Kind::Op)?, &PdDgla::new(&s.env.ctx))?,
                _ => Polyvector::new(&s.env.ctx, elem::<Grass>(&v, Kind::Pv)?),
            };
            let rep = ks_integrability(&kappa)?;
            Ok((rep.json(), pass_status(rep.passed())))
        }
        Cmd::Ainfty(c) => {
            let (s, v) = c.input()?;
            let a = ainfty_from_mc(&operator(&v, &s)?)?;
            let rows: Vec<Json> =
                a.table().into_iter().map(|(n, k, coeff)| json!({ "arity": n, "term": k, "coefficient": coeff })).collect();
            Ok((pretty(&json!({ "operations": rows })), 0))
        }
        Cmd::Stasheff { common: c, arity, mode, max_degree } => {
            let (s, v) = c.input()?;
            let a = ainfty_from_mc(&operator(&v, &s)?)?;
            let mode = match mode {
                Mode::Evaluation => StasheffMode::Evaluation { max_degree: *max_degree },
                Mode::Symbolic => StasheffMode::Symbolic,
            };
            let rep = ainfty_relations_check(&a, *arity, mode);
            Ok((pretty(&serde_json::to_value(&rep).expect("json")), pass_status(rep.status)))
        }
        Cmd::PiVerify { common: c, count } => {
            let mut c = c.clone();
            c.fixture.get_or_insert_with(|| "standard2".into());
            let s = c.session()?;
            let pair = pair_of(&s)?;
            let ctx = &s.env.ctx;
            let mut g = Gen::new(c.seed.unwrap_or(0));
            let pairs: Vec<_> = (0..*count).map(|_| (g.ltilde_form(ctx, 2), g.ltilde_form(ctx, 2))).collect();
            let triples: Vec<_> =
                (0..count / 2).map(|_| (g.ltilde_form(ctx, 2), g.ltilde_form(ctx, 2), g.ltilde_form(ctx, 2))).collect();
            let rep = verify_pi_identities(pair, ctx, &pairs, &triples)?;
            let mut j = serde_json::to_value(&rep).expect("json");
            j["status"] = json!(if rep.passed() { "pass" } else { "fail" });
            j["fixture"] = json!(c.fixture);
            Ok((pretty(&j), pass_status(rep.passed())))
        }
        Cmd::ExpPi(c) => {
            let (s, v) = c.input()?;
            let pair = pair_of(&s)?;
            let eta = sform(&v)?;
            let lz = OmegaDgla::new(&s.env.ctx, None, true);
            let lw = OmegaDgla::new(&s.env.ctx, Some(pair), true);
            let (f, _) = exp_pi(pair, &lz);
            let out = pushforward_mc(&f, &eta, &lz)?;
            let input = mc_check(&eta, &lz)?;
            let rep = mc_check(&out, &lw)?;
            let j = json!({
                "input_certificate": serde_json::to_value(&input).expect("json"),
                "pushforward": lw.show(&out),
                "certificate": serde_json::to_value(&rep).expect("json"),
            });
            Ok((pretty(&j), pass_status(input.passed() && rep.passed())))
        }
        Cmd::ThetaPi(c) => {
            let (s, v) = c.input()?;
            let pair = pair_of(&s)?;
            let out = theta_pi_pipeline(&sform(&v)?, pair, &s.env.ctx)?;
            let top = out.pv_level.terms().map(|(k, _, _)| k.count_ones()).max().unwrap_or(0);
            let j = json!({
                "omega_level": format!("s^-1({})", out.omega_level.text("dx")),
                "omega_certificate": serde_json::to_value(&out.omega_certificate).expect("json"),
                "pv_level": out.pv_level.text("th"),
                "pv_certificate": serde_json::to_value(&out.pv_certificate).expect("json"),
                "pv_in_eps_m_pv": out.pv_in_tilde,
                "top_polyvector_degree": top,
            });
            let ok = out.omega_certificate.passed() && out.pv_certificate.passed();
            Ok((pretty(&j), pass_status(ok)))
        }
        Cmd::PathCheck(c) => {
            let (s, v) = c.input()?;
            let car = carrier(c.context(&s, &v)?, &s)?;
            dispatch!(&car, l, want => {
                let eta = path_split(&elem(&v, want)?, l);
                let (rep, p0, p1) = mc_path_check(&eta, l)?;
                let j = json!({
                    "certificate": serde_json::to_value(&rep).expect("json"),
                    "a": l.show(&eta.a),
                    "b": l.show(&eta.b),
                    "endpoint_0": l.show(&p0),
                    "endpoint_1": l.show(&p1),
                });
                Ok((pretty(&j), pass_status(rep.passed())))
            })
        }
        Cmd::Membership(c) => {
            let (s, v) = c.input()?;
            let e = LOmegaElem::new(&s.env.ctx, sform(&v)?);
            let rows: Vec<Json> = e
                .membership_table(s.env.ctx.n)
                .into_iter()
                .map(|(space, inside)| json!({ "space": space, "member": inside }))
                .collect();
            Ok((pretty(&json!({ "element": e.text(), "membership": rows })), 0))
        }
    }
}

/// Parse an argument vector (program name first) and run it; usage errors give status 2.
pub fn run_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(c) => run_command(&c.cmd),
        Err(e) => (e.render().to_string(), if e.use_stderr() { 2 } else { 0 }),
    }
}

/// Entry point of the binary: run and print, report on stdout, usage text on stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(c) => {
            let (out, status) = run_command(&c.cmd);
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            // a closed pipe downstream is not an error of the run
            let _ = writeln!(stdout, "{out}");
            status
        }
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
