use std::fs;
use std::path::Path;

use ncrank::brank::{self, Arithmetic};
use ncrank::exactmat::{PrimeField, ScalarDomain, MIN_RANDOMIZED_MODULUS};
use ncrank::io::{self, PencilFile, TensorFile};
use ncrank::ncformula::{self, EvalOutcome, Formula, FormulaError};
use ncrank::pencil::{self, fixtures, LinearPencil, PencilError};
use ncrank::wedge;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{sha256_hex, RunConfig};
use crate::{AuditArgs, AuditKind, BrankCmd, Command, NcfCmd, RankCmd, WedgeCmd};

#[derive(Clone, Copy, Debug)]
pub enum Mode {
    Crk,
    Ncrk,
    Blowup(usize),
    Profile(usize, usize),
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    let bad = || format!("unknown mode {s:?}; expected crk, ncrk, blowup=<d> or profile=<p>x<q>");
    match s {
        "crk" => return Ok(Mode::Crk),
        "ncrk" => return Ok(Mode::Ncrk),
        _ => {}
    }
    if let Some(d) = s.strip_prefix("blowup=") {
        let d: usize = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err("blow-up size must be at least 1".into());
        }
        return Ok(Mode::Blowup(d));
    }
    if let Some(pq) = s.strip_prefix("profile=") {
        let (p, q) = pq.split_once('x').ok_or_else(bad)?;
        return Ok(Mode::Profile(
            p.parse().map_err(|_| bad())?,
            q.parse().map_err(|_| bad())?,
        ));
    }
    Err(bad())
}

/// What a command produced: one `(result, passed)` pair per output line.
pub struct Outcome {
    pub command: String,
    pub input_hash: String,
    pub items: Vec<(Value, Option<bool>)>,
    /// Whether a failure may be due to unlucky random draws.
    pub randomized: bool,
}

impl Outcome {
    fn new(command: &str, input: &[u8]) -> Self {
        Outcome {
            command: command.to_string(),
            input_hash: sha256_hex(input),
            items: Vec::new(),
            randomized: false,
        }
    }

    fn push<T: Serialize>(&mut self, value: &T, passed: Option<bool>) {
        self.items
            .push((serde_json::to_value(value).expect("reports serialize"), passed));
    }
}

type CmdResult = Result<Outcome, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn seed(config: &RunConfig) -> Result<u64, String> {
    config
        .seed
        .ok_or_else(|| "this command is randomized; pass --seed or set NCRANK_SEED".to_string())
}

fn read(path: &str) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("cannot read {path}: {e}"))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn utf8(bytes: &[u8]) -> Result<&str, String> {
    std::str::from_utf8(bytes).map_err(|_| "input is not UTF-8".to_string())
}

/// Rational pencils are reduced into the configured prime field; pencils
/// that carry a modulus keep it.
fn load_pencil(path: &str, config: &RunConfig) -> Result<(Vec<u8>, LinearPencil), String> {
    let bytes = read(path)?;
    let a = io::read_pencil(utf8(&bytes)?).map_err(|e| format!("{path}: {e}"))?;
    let a = match a.domain() {
        ScalarDomain::Rational => a.to_domain(prime_domain(config)).map_err(err)?,
        _ => a,
    };
    Ok((bytes, a))
}

fn prime_domain(config: &RunConfig) -> ScalarDomain {
    ScalarDomain::PrimeField {
        modulus: config.modulus,
    }
}

pub fn run(command: &Command, config: &RunConfig) -> CmdResult {
    let field = PrimeField::new(config.modulus).map_err(err)?;
    if field.modulus() <= MIN_RANDOMIZED_MODULUS {
        return Err(format!("--modulus {} must be a prime above 2^40", config.modulus));
    }
    if config.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    match command {
        Command::Rank(RankCmd::Pencil { file, mode }) => rank(file, *mode, config),
        Command::Audit(args) => audit(args, config),
        Command::Wedge(cmd) => wedge_cmd(cmd, config),
        Command::Brank(cmd) => brank_cmd(cmd, config),
        Command::Ncf(cmd) => ncf(cmd, config),
    }
}

fn rank(file: &str, mode: Mode, config: &RunConfig) -> CmdResult {
    let seed = seed(config)?;
    let (bytes, a) = load_pencil(file, config)?;
    let mut out = Outcome::new("rank pencil", &bytes);
    out.randomized = true;
    let t = config.trials;
    match mode {
        Mode::Crk => {
            let crk = pencil::crank_estimate(&a, t, seed).map_err(err)?;
            out.push(&json!({"mode": "crk", "crk": crk}), None);
        }
        Mode::Blowup(d) => {
            let report = pencil::blowup_rank_estimate(&a, d, t, seed).map_err(err)?;
            out.push(&report, None);
        }
        Mode::Ncrk => match pencil::ncrank_report(&a, t, seed) {
            Ok(report) => out.push(
                &json!({"mode": "ncrk", "ncrk": report.observed_rank / report.d, "report": report}),
                None,
            ),
            Err(e @ PencilError::NotStabilized { .. }) => {
                out.push(&json!({"mode": "ncrk", "error": e.to_string()}), Some(false));
            }
            Err(e) => return Err(err(e)),
        },
        Mode::Profile(p, q) => {
            let profile = pencil::profile(&a, p, q, t, seed).map_err(err)?;
            out.push(&profile, None);
        }
    }
    Ok(out)
}

fn random_spec(items: &[String]) -> Result<(usize, usize, usize, usize), String> {
    let get = |key: &str| -> Result<usize, String> {
        items
            .iter()
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == key)
            .ok_or_else(|| format!("--random needs {key}=<n>"))?
            .1
            .parse()
            .map_err(|_| format!("--random {key} must be a non-negative integer"))
    };
    let parsed = (get("rows")?, get("cols")?, get("vars")?, get("count")?);
    for kv in items {
        match kv.split_once('=') {
            Some(("rows" | "cols" | "vars" | "count", _)) => {}
            _ => return Err(format!("unknown --random item {kv:?}")),
        }
    }
    Ok(parsed)
}

fn audit(args: &AuditArgs, config: &RunConfig) -> CmdResult {
    let seed = seed(config)?;
    let (hash_input, pencils) = match (&args.input, &args.random) {
        (Some(path), _) => {
            let (bytes, a) = load_pencil(path, config)?;
            (bytes, vec![a])
        }
        (None, Some(items)) => {
            let (rows, cols, vars, count) = random_spec(items)?;
            let canonical = format!("random rows={rows} cols={cols} vars={vars} count={count}");
            let batch = fixtures::random_batch(rows, cols, vars, count, seed, prime_domain(config));
            (canonical.into_bytes(), batch)
        }
        (None, None) => return Err("pass --input <file> or --random ...".into()),
    };
    let name = format!("audit {:?}", args.kind).to_lowercase();
    let mut out = Outcome::new(&name, &hash_input);
    out.randomized = true;
    let (t, d) = (config.trials, args.d_max);
    for (index, a) in pencils.iter().enumerate() {
        let (value, passed) = match args.kind {
            AuditKind::Regularity => {
                let r = pencil::regularity_audit(a, d, t, seed).map_err(err)?;
                (serde_json::to_value(&r).unwrap(), r.passed)
            }
            AuditKind::Monotone => {
                let r = pencil::monotone_audit(a, d, t, seed).map_err(err)?;
                (serde_json::to_value(&r).unwrap(), r.passed)
            }
            AuditKind::Concavity => {
                let (profile, violations) = pencil::audit::audited_profile(a, d, d, t, seed).map_err(err)?;
                let passed = violations.is_empty();
                (json!({"profile": profile, "violations": violations}), passed)
            }
            AuditKind::Ratio => {
                let r = pencil::ratio_audit(a, t, seed).map_err(err)?;
                (serde_json::to_value(&r).unwrap(), r.passed)
            }
        };
        out.push(&json!({"index": index, "audit": value}), Some(passed));
    }
    Ok(out)
}

fn wedge_cmd(cmd: &WedgeCmd, config: &RunConfig) -> CmdResult {
    let m = config.modulus;
    Ok(match cmd {
        WedgeCmd::Build { p, n, emit } => {
            let mut out = Outcome::new("wedge build", format!("wedge p={p} n={n}").as_bytes());
            let a = wedge::wedge_pencil(*p, *n, ScalarDomain::Rational).map_err(err)?;
            let file = PencilFile::from_pencil(&a);
            let mut value =
                json!({"p": p, "n": n, "rows": a.rows(), "cols": a.cols(), "num_vars": a.num_vars()});
            match emit {
                Some(path) => {
                    write(Path::new(path), &io::to_json(&file))?;
                    value["emitted"] = json!(path);
                }
                None => value["pencil"] = serde_json::to_value(&file).unwrap(),
            }
            out.push(&value, None);
            out
        }
        WedgeCmd::CheckBlocks { p, n } => {
            let mut out = Outcome::new("wedge check-blocks", format!("wedge p={p} n={n}").as_bytes());
            let check = wedge::block_structure_check(*p, *n).map_err(err)?;
            out.push(&check, Some(check.passed));
            out
        }
        WedgeCmd::Witness { p } => {
            let mut out = Outcome::new("wedge witness", format!("witness p={p}").as_bytes());
            let cert = wedge::certify_witness(*p, m).map_err(err)?;
            out.push(&cert, Some(cert.full));
            out
        }
        WedgeCmd::Ratio { p } => {
            let mut out = Outcome::new("wedge ratio", format!("wedge p={p} n={}", 2 * p + 1).as_bytes());
            out.randomized = true;
            let r = wedge::ratio_report(*p, config.trials, seed(config)?, m).map_err(err)?;
            out.push(&r, Some(r.passed));
            out
        }
        WedgeCmd::Egfamily { i, n } => {
            let mut out = Outcome::new("wedge egfamily", format!("wedge p={i} n={n}").as_bytes());
            out.randomized = true;
            let r = wedge::egfamily_audit(*i, *n, config.trials, seed(config)?, m).map_err(err)?;
            out.push(&r, Some(r.passed));
            out
        }
    })
}

fn brank_cmd(cmd: &BrankCmd, config: &RunConfig) -> CmdResult {
    Ok(match cmd {
        BrankCmd::Certify { tensor, p, exact } => {
            let bytes = read(tensor)?;
            let t = io::read_tensor(utf8(&bytes)?).map_err(|e| format!("{tensor}: {e}"))?;
            let arithmetic = if *exact {
                Arithmetic::ExactRational
            } else {
                Arithmetic::Prime {
                    modulus: config.modulus,
                }
            };
            let cert = brank::certify(&t, *p, arithmetic).map_err(err)?;
            let mut out = Outcome::new("brank certify", &bytes);
            out.push(&cert, None);
            out
        }
        BrankCmd::Explicit { p, emit, certify } => {
            let t = brank::explicit_tensor(*p).map_err(err)?;
            let text = io::write_tensor(&t);
            let mut out = Outcome::new("brank explicit", text.as_bytes());
            let (a, b, c) = t.dims();
            let mut value = json!({"p": p, "dims": [a, b, c]});
            match emit {
                Some(path) => {
                    write(Path::new(path), &text)?;
                    value["emitted"] = json!(path);
                }
                None => value["tensor"] = serde_json::to_value(TensorFile::from_tensor(&t)).unwrap(),
            }
            let mut passed = None;
            if *certify {
                let cert = brank::certify(&t, *p, Arithmetic::ExactRational).map_err(err)?;
                let target = 2 * (2 * p + 1) - 3;
                passed = Some(cert.lower_bound >= target);
                value["target_lower_bound"] = json!(target);
                value["certificate"] = serde_json::to_value(&cert).unwrap();
            }
            out.push(&value, passed);
            out
        }
        BrankCmd::Equations { p } => {
            let mut out = Outcome::new("brank equations", format!("equations p={p}").as_bytes());
            out.randomized = true;
            let r = brank::equations_threshold_check(*p, config.trials, seed(config)?, config.modulus)
                .map_err(err)?;
            out.push(&r, Some(r.passed));
            out
        }
    })
}

fn expression_text(arg: &str) -> Result<String, String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(utf8(&read(path)?)?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

fn parse_expr(text: &str) -> Result<ncformula::Expr, String> {
    ncformula::parse(text).map_err(|e| {
        let caret = format!("{}^", " ".repeat(e.position));
        format!("{e}\n  {text}\n  {caret}")
    })
}

fn ncf(cmd: &NcfCmd, config: &RunConfig) -> CmdResult {
    let m = config.modulus;
    Ok(match cmd {
        NcfCmd::Eval { expr, dim } => {
            if *dim == 0 {
                return Err("--dim must be at least 1".into());
            }
            let text = expression_text(expr)?;
            let e = parse_expr(&text)?;
            let f = Formula::from_expr(&e);
            let field = PrimeField::new(m).map_err(err)?;
            let at =
                ncformula::random_assignment(&f, *dim, field, seed(config)?, &[*dim as u64]).map_err(err)?;
            let mut out = Outcome::new("ncf eval", text.as_bytes());
            let mut value = json!({"expr": e.to_string(), "dim": dim, "vars": f.vars(), "gates": f.len()});
            match ncformula::eval_formula(&f, &at).map_err(err)? {
                EvalOutcome::Value(v) => {
                    let rows: Vec<Vec<String>> = (0..v.rows())
                        .map(|i| (0..v.cols()).map(|j| v.get(i, j).to_string()).collect())
                        .collect();
                    value["outcome"] = json!(if v.is_zero() {
                        "zero"
                    } else if v.is_identity() {
                        "identity"
                    } else {
                        "value"
                    });
                    value["value"] = json!(rows);
                }
                EvalOutcome::Undefined(g) => {
                    value["outcome"] = json!("undefined");
                    value["gate"] = json!(g);
                }
            }
            out.push(&value, None);
            out
        }
        NcfCmd::Bergman { dim } => {
            let mut out = Outcome::new("ncf bergman", ncformula::bergman_psi().to_string().as_bytes());
            out.randomized = true;
            let r = ncformula::bergman_dichotomy(*dim, config.trials, seed(config)?, m).map_err(err)?;
            out.push(&r, Some(r.passed));
            out
        }
        NcfCmd::Linearize { expr, emit_pencils } => {
            let text = expression_text(expr)?;
            let e = parse_expr(&text)?;
            let f = Formula::from_expr(&e);
            let rs = ncformula::linearize(&f);
            let mut out = Outcome::new("ncf linearize", text.as_bytes());
            let mut value = json!({
                "expr": e.to_string(),
                "vars": f.vars(),
                "gates": rs.len(),
                "root_size": rs[0].size(),
            });
            if let Some(dir) = emit_pencils {
                value["manifest"] = json!(emit_gate_pencils(Path::new(dir), &e, &f, &rs)?);
            }
            out.push(&value, None);
            out
        }
        NcfCmd::Counterexample => {
            let e = ncformula::counterexample_expr();
            let mut out = Outcome::new("ncf counterexample", e.to_string().as_bytes());
            out.randomized = true;
            match ncformula::find_blowup_nonmonotone(config.trials, seed(config)?, m) {
                Ok(g) => {
                    let passed = g.r2 == 2 * g.size && g.r3 < 3 * g.size && g.r3 % 3 == 0;
                    out.push(&g, Some(passed));
                }
                Err(e @ FormulaError::NotFound { gates }) => {
                    out.push(
                        &json!({"error": e.to_string(), "gates_scanned": gates}),
                        Some(false),
                    );
                }
                Err(e) => return Err(err(e)),
            }
            out
        }
    })
}

fn emit_gate_pencils(
    dir: &Path,
    e: &ncformula::Expr,
    f: &Formula,
    rs: &[ncformula::Realization],
) -> Result<String, String> {
    fs::create_dir_all(dir).map_err(|x| format!("cannot create {}: {x}", dir.display()))?;
    let width = rs.len().to_string().len();
    let vec_json = |w: &[(usize, num_rational::BigRational)]| -> Value {
        json!(w
            .iter()
            .map(|(i, x)| json!([i, x.to_string()]))
            .collect::<Vec<_>>())
    };
    let mut gates = Vec::with_capacity(rs.len());
    for r in rs {
        let name = format!("gate_{:0width$}.json", r.gate());
        let file = PencilFile::from_realization(r, ScalarDomain::Rational).map_err(err)?;
        write(&dir.join(&name), &io::to_json(&file))?;
        gates.push(json!({
            "gate_id": r.gate(),
            "kind": f.gate(r.gate()).kind(),
            "file": name,
            "size": r.size(),
            "u": vec_json(r.u()),
            "v": vec_json(r.v()),
        }));
    }
    let manifest = json!({"expr": e.to_string(), "vars": f.vars(), "gates": gates});
    let path = dir.join("manifest.json");
    write(&path, &io::to_json(&manifest))?;
    Ok(path.display().to_string())
}
