//! Batch command-line surface: parse state files, run the engine, emit
//! deterministic reports.
//!
//! Exit codes: 0 success (or Equivalent), 1 Inequivalent, 2 input or parse
//! error, 3 not permutation symmetric, 4 numerical abort, 5 undecidable
//! (zero stabilizer).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use lustab::{
    canonical_form, classify, decompose_algebra, lu_equivalent, stabilizer_basis,
    verify_block_relations, CanonicalData, ClassTag, Complex64, EquivOutcome,
    LocalAlgebraElement, LocalUnitary, PauliIndex, PauliOperator, RankDiagnostics, Tolerances,
    Unitary2,
};

const MIXTURE_WEIGHT_SLACK: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "lustab",
    about = "Stabilizer algebras and local-unitary classification of multiqubit states",
    version
)]
struct Cli {
    /// Relative singular-value threshold for rank decisions.
    #[arg(long, global = true, value_name = "FLOAT")]
    rank_tol: Option<f64>,

    /// Numerical comparison tolerance.
    #[arg(long, global = true, value_name = "FLOAT")]
    num_tol: Option<f64>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a symmetric state and report its canonical form.
    Classify { file: PathBuf },
    /// Decide local-unitary equivalence of two symmetric states.
    Equiv { file_a: PathBuf, file_b: PathBuf },
    /// Compute the stabilizer algebra of any state (symmetry not required).
    Stabilizer {
        file: PathBuf,
        /// Also decompose the algebra into blocks, 1-d summands, and
        /// trivial qubits.
        #[arg(long)]
        decompose: bool,
    },
    /// Canonical form with the full aligning transformation.
    Canon { file: PathBuf },
}

enum CliError {
    Input(String),
    Engine(lustab::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl From<lustab::Error> for CliError {
    fn from(e: lustab::Error) -> Self {
        CliError::Engine(e)
    }
}

fn exit_code_of(err: &CliError) -> u8 {
    use lustab::Error as E;
    match err {
        CliError::Input(_) => 2,
        CliError::Engine(e) => match e {
            E::DimensionMismatch { .. }
            | E::ParamOutOfRange(_)
            | E::NotNormalized { .. }
            | E::DegreeTooHigh { .. }
            | E::ResourceLimit { .. } => 2,
            E::NotSymmetric { .. } => 3,
            E::ZeroClassUnsupported => 5,
            E::HermiticityViolation { .. }
            | E::NotRotation { .. }
            | E::Rank2Anomaly { .. }
            | E::NotClosed { .. }
            | E::IllConditioned { .. }
            | E::NonUniformProjections { .. }
            | E::UnclassifiableDimension { .. }
            | E::BasisExpansionResidual { .. }
            | E::WitnessVerification { .. } => 4,
        },
    }
}

// ---------------------------------------------------------------------
// State files
// ---------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    n: usize,
    #[serde(default)]
    pauli: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    preset: Option<Preset>,
    #[serde(default)]
    mixture: Option<Vec<MixEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixEntry {
    weight: f64,
    state: StateFile,
}

// Parsed by hand from a Value: serde's tagged-enum content buffering is
// incompatible with arbitrary-precision numbers.
#[derive(Deserialize)]
#[serde(try_from = "Value")]
enum Preset {
    CompletelyMixed,
    Product,
    Singlet,
    Dicke { k: usize },
    DickeMixture { k: usize },
    Ghz { alpha: Option<Complex64>, beta: Option<Complex64> },
    Werner { c: Vec<f64> },
}

fn value_f64(v: &Value, what: &str) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("{what} must be a number"))
}

fn value_usize(v: &Value, what: &str) -> Result<usize, String> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| format!("{what} must be a nonnegative integer"))
}

fn value_complex(v: &Value, what: &str) -> Result<Complex64, String> {
    if let Some(r) = v.as_f64() {
        return Ok(Complex64::new(r, 0.0));
    }
    if let Some(pair) = v.as_array() {
        if let [re, im] = pair.as_slice() {
            if let (Some(re), Some(im)) = (re.as_f64(), im.as_f64()) {
                return Ok(Complex64::new(re, im));
            }
        }
    }
    Err(format!("{what} must be a number or an [re, im] pair"))
}

impl TryFrom<Value> for Preset {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        let obj = v.as_object().ok_or("preset must be an object")?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or("preset needs a string field \"kind\"")?;
        let allowed: &[&str] = match kind {
            "completely_mixed" | "product" | "singlet" => &[],
            "dicke" | "dicke_mixture" => &["k"],
            "ghz" => &["alpha", "beta"],
            "werner" => &["c"],
            other => return Err(format!("unknown preset kind {other:?}")),
        };
        for key in obj.keys() {
            if key != "kind" && !allowed.contains(&key.as_str()) {
                return Err(format!("preset {kind:?} does not take field {key:?}"));
            }
        }
        Ok(match kind {
            "completely_mixed" => Preset::CompletelyMixed,
            "product" => Preset::Product,
            "singlet" => Preset::Singlet,
            "dicke" | "dicke_mixture" => {
                let k = value_usize(obj.get("k").ok_or("preset needs a field \"k\"")?, "k")?;
                if kind == "dicke" {
                    Preset::Dicke { k }
                } else {
                    Preset::DickeMixture { k }
                }
            }
            "ghz" => Preset::Ghz {
                alpha: obj.get("alpha").map(|v| value_complex(v, "alpha")).transpose()?,
                beta: obj.get("beta").map(|v| value_complex(v, "beta")).transpose()?,
            },
            "werner" => {
                let arr = obj
                    .get("c")
                    .and_then(Value::as_array)
                    .ok_or("werner preset needs an array field \"c\"")?;
                let mut c = Vec::with_capacity(arr.len());
                for (k, v) in arr.iter().enumerate() {
                    c.push(value_f64(v, &format!("c[{k}]"))?);
                }
                Preset::Werner { c }
            }
            _ => unreachable!(),
        })
    }
}

fn digit_of(ch: char) -> Option<u8> {
    match ch {
        'i' | 'I' | '0' => Some(0),
        'x' | 'X' | '1' => Some(1),
        'y' | 'Y' | '2' => Some(2),
        'z' | 'Z' | '3' => Some(3),
        _ => None,
    }
}

fn build_state(file: &StateFile) -> Result<PauliOperator, CliError> {
    let n = file.n;
    let payloads =
        file.pauli.is_some() as u8 + file.preset.is_some() as u8 + file.mixture.is_some() as u8;
    if payloads != 1 {
        return Err(CliError::Input(format!(
            "state file must have exactly one of pauli / preset / mixture, found {payloads}"
        )));
    }
    if let Some(map) = &file.pauli {
        let mut rho = PauliOperator::new(n);
        for (key, &value) in map {
            if key.chars().count() != n {
                return Err(CliError::Input(format!(
                    "pauli index {key:?} has length {}, expected {n}",
                    key.chars().count()
                )));
            }
            if !value.is_finite() {
                return Err(CliError::Input(format!("pauli coefficient for {key:?} not finite")));
            }
            let mut digits = Vec::with_capacity(n);
            for ch in key.chars() {
                let d = digit_of(ch).ok_or_else(|| {
                    CliError::Input(format!(
                        "pauli index {key:?}: character {ch:?} is not in i/x/y/z or 0..3"
                    ))
                })?;
                digits.push(d);
            }
            rho.add_term(PauliIndex::from_digits(&digits), value);
        }
        return Ok(rho);
    }
    if let Some(preset) = &file.preset {
        let rho = match preset {
            Preset::CompletelyMixed => lustab::states::completely_mixed(n),
            Preset::Product => lustab::states::product_zero(n),
            Preset::Singlet => {
                if n != 2 {
                    return Err(CliError::Input(format!("singlet preset needs n = 2, got {n}")));
                }
                lustab::states::singlet()
            }
            Preset::Dicke { k } => lustab::states::dicke_pure(n, *k)?,
            Preset::DickeMixture { k } => lustab::states::dicke_rho(n, *k)?,
            Preset::Ghz { alpha, beta } => {
                let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                lustab::states::ghz_rho(n, alpha.unwrap_or(half), beta.unwrap_or(half))?
            }
            Preset::Werner { c } => {
                let mut rho = PauliOperator::new(n);
                for (k, &ck) in c.iter().enumerate() {
                    let basis = lustab::states::werner_basis(n, k)?;
                    rho.add_scaled(ck, &basis)?;
                }
                rho
            }
        };
        return Ok(rho);
    }
    let mixture = file.mixture.as_ref().unwrap();
    if mixture.is_empty() {
        return Err(CliError::Input("mixture must not be empty".into()));
    }
    let total: f64 = mixture.iter().map(|e| e.weight).sum();
    if (total - 1.0).abs() > MIXTURE_WEIGHT_SLACK {
        return Err(CliError::Input(format!(
            "mixture weights sum to {total}, expected 1 within {MIXTURE_WEIGHT_SLACK:e}"
        )));
    }
    let mut rho = PauliOperator::new(n);
    for entry in mixture {
        if entry.state.n != n {
            return Err(CliError::Input(format!(
                "mixture component has n = {}, expected {n}",
                entry.state.n
            )));
        }
        let part = build_state(&entry.state)?;
        rho.add_scaled(entry.weight, &part)?;
    }
    Ok(rho)
}

fn load_state(path: &Path) -> Result<PauliOperator, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))?;
    build_state(&file)
}

// ---------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------

/// Deterministic float encoding: 12 significant digits, negative zero
/// normalized away.
fn fnum(v: f64) -> Value {
    let v = if v == 0.0 { 0.0 } else { v };
    let s = format!("{v:.11e}");
    Value::Number(s.parse().expect("formatted float is a valid JSON number"))
}

fn fvec(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| fnum(x)).collect())
}

fn complex_value(z: Complex64) -> Value {
    Value::Array(vec![fnum(z.re), fnum(z.im)])
}

fn factor_value(u: &Unitary2) -> Value {
    Value::Array(vec![complex_value(u.a), complex_value(u.b)])
}

fn unitary_value(u: &LocalUnitary) -> Value {
    Value::Array(u.factors().iter().map(factor_value).collect())
}

fn element_value(m: &LocalAlgebraElement) -> Value {
    Value::Array(
        m.parts()
            .iter()
            .map(|p| Value::Array(vec![fnum(p.a), fnum(p.b), fnum(p.c)]))
            .collect(),
    )
}

fn canonical_value(data: &CanonicalData) -> Value {
    match data {
        CanonicalData::FullLG => json!({ "class": "FullLG" }),
        CanonicalData::Werner { c } => json!({ "class": "Werner", "c": fvec(c) }),
        CanonicalData::Product { c } => json!({ "class": "Product", "c": fvec(c) }),
        CanonicalData::Ghz { d, gamma } => {
            json!({ "class": "GHZ", "d": fvec(d), "gamma": fnum(*gamma) })
        }
        CanonicalData::Dicke { b } => {
            let map: BTreeMap<String, Value> =
                b.iter().map(|(&(r, s), &v)| (format!("{r},{s}"), fnum(v))).collect();
            json!({ "class": "Dicke", "b": map })
        }
    }
}

fn diagnostics_value(diag: &RankDiagnostics) -> Value {
    json!({
        "gap": diag.gap.map_or(Value::Null, fnum),
        "max_bracket_residual": fnum(diag.max_residual),
        "rank": diag.rank,
        "singular_values": fvec(&diag.singular_values),
        "tau": fnum(diag.tau),
    })
}

fn tolerance_value(tol: &Tolerances) -> Value {
    json!({
        "herm": fnum(tol.herm),
        "num": fnum(tol.num),
        "orth": fnum(tol.orth),
        "rank_gap": fnum(tol.rank_gap),
        "rank_rel": fnum(tol.rank_rel),
        "sparse": fnum(tol.sparse),
        "unit": fnum(tol.unit),
    })
}

fn base_report(command: &str, inputs: &[&Path], tol: &Tolerances) -> Value {
    json!({
        "command": command,
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "tolerances": tolerance_value(tol),
    })
}

fn tag_string(tag: ClassTag) -> String {
    tag.to_string()
}

fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten(report, String::new(), &mut lines);
            let mut s = lines.join("\n");
            s.push('\n');
            s
        }
    }
}

fn flatten(v: &Value, path: String, lines: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let next = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(val, next, lines);
            }
        }
        other => lines.push(format!("{path} = {other}")),
    }
}

// ---------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------

fn cmd_classify(path: &Path, tol: &Tolerances) -> Result<(Value, u8), CliError> {
    let rho = load_state(path)?;
    let class = classify(&rho, tol)?;
    let mut report = base_report("classify", &[path], tol);
    report["tag"] = Value::String(tag_string(class.tag));
    report["dim"] = json!(class.dim());
    report["projections"] = json!(vec![class.proj; rho.n()]);
    if class.tag == ClassTag::Zero {
        report["canonical"] = Value::Null;
        report["twin"] = Value::Null;
        report["residual"] = Value::Null;
    } else {
        let form = canonical_form(&rho, tol)?;
        report["canonical"] = canonical_value(&form.data);
        report["twin"] =
            form.twin.as_ref().map_or(Value::String("unique".into()), canonical_value);
        report["residual"] = fnum(form.residual);
    }
    Ok((report, 0))
}

fn cmd_canon(path: &Path, tol: &Tolerances) -> Result<(Value, u8), CliError> {
    let rho = load_state(path)?;
    let form = canonical_form(&rho, tol)?;
    let mut report = base_report("canon", &[path], tol);
    report["tag"] = Value::String(tag_string(form.tag));
    report["canonical"] = canonical_value(&form.data);
    report["twin"] = form.twin.as_ref().map_or(Value::String("unique".into()), canonical_value);
    report["transformer"] = unitary_value(&form.transformer.sign_normalized());
    report["residual"] = fnum(form.residual);
    Ok((report, 0))
}

fn cmd_equiv(path_a: &Path, path_b: &Path, tol: &Tolerances) -> Result<(Value, u8), CliError> {
    let rho_a = load_state(path_a)?;
    let rho_b = load_state(path_b)?;
    let tag_a = classify(&rho_a, tol)?.tag;
    let tag_b = classify(&rho_b, tol)?.tag;
    let outcome = lu_equivalent(&rho_a, &rho_b, tol)?;
    let mut report = base_report("equiv", &[path_a, path_b], tol);
    report["tags"] = json!([tag_string(tag_a), tag_string(tag_b)]);
    let code = match outcome {
        EquivOutcome::Equivalent(w) => {
            report["verdict"] = Value::String("equivalent".into());
            report["witness"] = unitary_value(&w);
            0
        }
        EquivOutcome::Inequivalent => {
            report["verdict"] = Value::String("inequivalent".into());
            report["witness"] = Value::Null;
            1
        }
        EquivOutcome::Unknown => {
            report["verdict"] = Value::String("unknown".into());
            report["witness"] = Value::Null;
            5
        }
    };
    Ok((report, code))
}

fn cmd_stabilizer(path: &Path, decompose: bool, tol: &Tolerances) -> Result<(Value, u8), CliError> {
    let rho = load_state(path)?;
    let (basis, diag) = stabilizer_basis(&rho, tol)?;
    let mut report = base_report("stabilizer", &[path], tol);
    report["dim"] = json!(basis.dim());
    report["elements"] = Value::Array(basis.elements().iter().map(element_value).collect());
    report["diagnostics"] = diagnostics_value(&diag);
    report["decompose"] = json!(decompose);
    if decompose {
        let decomp = decompose_algebra(&basis, tol)?;
        let relations = verify_block_relations(&decomp);
        report["decomposition"] = json!({
            "blocks": decomp
                .blocks
                .iter()
                .map(|b| json!({
                    "qubits": b.qubits,
                    "u": element_value(&b.u),
                    "v": element_value(&b.v),
                    "w": element_value(&b.w),
                }))
                .collect::<Vec<_>>(),
            "r_qubits": decomp.r_qubits,
            "relations_residual": fnum(relations.max_residual),
            "s_basis": decomp.s_basis.iter().map(element_value).collect::<Vec<_>>(),
            "s_qubits": decomp.s_qubits,
        });
    } else {
        report["decomposition"] = Value::Null;
    }
    Ok((report, 0))
}

fn run(cli: &Cli) -> Result<(Value, u8), CliError> {
    let mut tol = Tolerances::default();
    if let Some(r) = cli.rank_tol {
        if !(r.is_finite() && r > 0.0 && r < 1.0) {
            return Err(CliError::Input(format!("rank-tol must be in (0, 1), got {r}")));
        }
        tol.rank_rel = r;
    }
    if let Some(e) = cli.num_tol {
        if !(e.is_finite() && e > 0.0 && e < 1.0) {
            return Err(CliError::Input(format!("num-tol must be in (0, 1), got {e}")));
        }
        tol.num = e;
    }
    match &cli.cmd {
        Cmd::Classify { file } => cmd_classify(file, &tol),
        Cmd::Equiv { file_a, file_b } => cmd_equiv(file_a, file_b, &tol),
        Cmd::Stabilizer { file, decompose } => cmd_stabilizer(file, *decompose, &tol),
        Cmd::Canon { file } => cmd_canon(file, &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, code)) => {
            print!("{}", render(&report, cli.format));
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_of(&err))
        }
    }
}
