use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kvnsim::estimator::{estimate, EstimateReport};
use kvnsim::evolution::{
    compare, convergence_sweep, evolve_streaming, uniform_grid, write_sweep_csv, EvolveOptions,
};
use kvnsim::fock::{encode_observable, encode_position, FockBasis, ObservableSpec, OccupationWord};
use kvnsim::hamiltonian::{build_hamiltonian, norm_certificate, write_csv};
use kvnsim::io::{DuffingFile, HarmonicFile, KuramotoFile, ObservableFile, RandomFile, SystemFile};
use kvnsim::models::{
    kuramoto_transform, make_duffing, make_harmonic, make_kuramoto, random_system, Transform,
};
use kvnsim::ode::{validate_system, OdeSystem};
use kvnsim::Error;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::{Cli, Command, Format, ModelKind, RunArgs};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Usage(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(s) | CliError::Usage(s) | CliError::Runtime(s) => f.write_str(s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidSystem(_) | Error::Parse(_) | Error::Json(_) => CliError::Validation(msg),
            Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::MalformedWord(_)
            | Error::ObservableDegree { .. } => CliError::Usage(msg),
            _ => CliError::Runtime(msg),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Files read and written by one run, plus everything meant for stdout.
#[derive(Default)]
struct Session {
    stdout: String,
    inputs: Vec<(PathBuf, String)>,
    outputs: Vec<(PathBuf, String)>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl Session {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
        self.inputs
            .push((path.to_path_buf(), sha256_hex(text.as_bytes())));
        Ok(text)
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push((path.to_path_buf(), sha256_hex(bytes)));
        Ok(())
    }

    /// To `path` when given, else to stdout.
    fn emit(&mut self, path: Option<&Path>, bytes: Vec<u8>) -> CliResult<()> {
        match path {
            Some(p) => self.write(p, &bytes),
            None => {
                self.stdout.push_str(&String::from_utf8_lossy(&bytes));
                Ok(())
            }
        }
    }

    fn say(&mut self, line: impl AsRef<str>) {
        self.stdout.push_str(line.as_ref());
        self.stdout.push('\n');
    }

    fn load_system(&mut self, path: &Path) -> CliResult<(OdeSystem, SystemFile)> {
        let file = SystemFile::parse(&self.read(path)?)?;
        let sys = OdeSystem::from_draft(&file.to_draft()?)?;
        Ok((sys, file))
    }

    fn load_observable(&mut self, path: &Path) -> CliResult<ObservableSpec> {
        Ok(ObservableFile::parse(&self.read(path)?)?.to_spec()?)
    }
}

fn hashes(list: &[(PathBuf, String)]) -> serde_json::Value {
    list.iter()
        .map(|(p, h)| json!({ "path": p.display().to_string(), "sha256": h }))
        .collect()
}

/// Runs one parsed command. Stdout is printed even when the command
/// fails after producing output (a failed certificate, say).
pub fn run(cli: &Cli, args: &[String]) -> CliResult<()> {
    let mut s = Session::default();
    let outcome = dispatch(&cli.command, &mut s);
    print!("{}", s.stdout);
    let _ = std::io::stdout().flush();
    if let Some(path) = &cli.emit_manifest {
        let manifest = json!({
            "tool": "kvnsim",
            "version": env!("CARGO_PKG_VERSION"),
            "args": args,
            "status": match &outcome { Ok(()) => "ok".to_string(), Err(e) => e.to_string() },
            "inputs": hashes(&s.inputs),
            "outputs": hashes(&s.outputs),
            "stdout_sha256": sha256_hex(s.stdout.as_bytes()),
        });
        let text = serde_json::to_string_pretty(&manifest).expect("manifest is plain JSON") + "\n";
        fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    outcome
}

fn dispatch(cmd: &Command, s: &mut Session) -> CliResult<()> {
    match cmd {
        Command::Validate { system } => validate(s, system),
        Command::Model {
            kind,
            spec,
            out,
            seed,
        } => model(s, *kind, spec, out, *seed),
        Command::Build {
            system,
            m,
            out,
            certificate,
        } => build(s, system, *m, out, certificate.as_deref()),
        Command::Evolve { run, m, observable } => evolve_cmd(s, run, *m, observable.as_deref()),
        Command::Compare { run, m, observable } => compare_cmd(s, run, *m, observable),
        Command::Sweep {
            run,
            m_list,
            observable,
        } => sweep(s, run, m_list, observable),
        Command::Estimate {
            system,
            b,
            eps,
            t,
            rk_order,
            format,
            out,
        } => estimate_cmd(s, system, *b, *eps, *t, *rk_order, *format, out.as_deref()),
        Command::Rank { n, m, word } => {
            let basis = FockBasis::new(*n, *m)?;
            let w = OccupationWord::new(word.clone(), *n)?;
            s.say(basis.rank(&w)?.to_string());
            Ok(())
        }
        Command::Unrank { n, m, index } => {
            let w = FockBasis::new(*n, *m)?.unrank(*index)?;
            let text: Vec<String> = w.symbols().iter().map(|v| v.to_string()).collect();
            s.say(text.join(","));
            Ok(())
        }
    }
}

fn validate(s: &mut Session, path: &Path) -> CliResult<()> {
    let file = SystemFile::parse(&s.read(path)?)?;
    let report = validate_system(&file.to_draft()?);
    for w in &report.warnings {
        s.say(format!("warning: {w}"));
    }
    match (report.ok, report.constants) {
        (true, Some(k)) => {
            s.say(format!(
                "ok N={} interactions={} d={} c={} η={}",
                file.n,
                file.interactions.len(),
                k.d,
                k.c,
                k.eta
            ));
            Ok(())
        }
        _ => {
            for v in &report.violations {
                s.say(format!("violation [{}]: {}", v.rule, v.detail));
            }
            Err(CliError::Validation(format!(
                "{} is not a valid system",
                path.display()
            )))
        }
    }
}

/// Physical `(x, v)` point when either part is given; missing parts are zero.
fn oscillator_state(
    t: &Transform,
    n: usize,
    x0: &Option<Vec<f64>>,
    v0: &Option<Vec<f64>>,
) -> CliResult<Option<Vec<f64>>> {
    if x0.is_none() && v0.is_none() {
        return Ok(None);
    }
    let mut physical = x0.clone().unwrap_or_else(|| vec![0.0; n]);
    physical.extend(v0.clone().unwrap_or_else(|| vec![0.0; n]));
    Ok(Some(t.to_system(&physical)?))
}

fn model(
    s: &mut Session,
    kind: ModelKind,
    spec: &Path,
    out: &Path,
    seed: Option<u64>,
) -> CliResult<()> {
    let text = s.read(spec)?;
    let parse_err = |e: serde_json::Error| CliError::Validation(format!("{}: {e}", spec.display()));
    let (sys, x0, names) = match kind {
        ModelKind::Kuramoto => {
            let f: KuramotoFile = serde_json::from_str(&text).map_err(parse_err)?;
            let spec = f.to_spec()?;
            let (sys, x0) = make_kuramoto(&spec)?;
            (
                sys,
                Some(x0),
                Some(kuramoto_transform(spec.n()).names().to_vec()),
            )
        }
        ModelKind::Harmonic => {
            let f: HarmonicFile = serde_json::from_str(&text).map_err(parse_err)?;
            let (sys, t) = make_harmonic(&f.to_spec())?;
            let x0 = oscillator_state(&t, f.masses.len(), &f.x0, &f.v0)?;
            (sys, x0, Some(t.names().to_vec()))
        }
        ModelKind::Duffing => {
            let f: DuffingFile = serde_json::from_str(&text).map_err(parse_err)?;
            let (sys, t) = make_duffing(&f.to_spec()?)?;
            let x0 = oscillator_state(&t, f.masses.len(), &f.x0, &f.v0)?;
            (sys, x0, Some(t.names().to_vec()))
        }
        ModelKind::Random => {
            let seed =
                seed.ok_or_else(|| CliError::Usage("model random requires --seed".into()))?;
            let f: RandomFile = serde_json::from_str(&text).map_err(parse_err)?;
            (random_system(&f.to_spec(), seed)?, None, None)
        }
    };
    let file = SystemFile::from_system(&sys, x0.as_deref(), names.as_deref());
    let json = file.to_json()? + "\n";
    s.write(out, json.as_bytes())?;
    let k = sys.constants();
    s.say(format!(
        "wrote {} N={} interactions={} d={} c={} η={}",
        out.display(),
        sys.n_vars(),
        sys.interactions().len(),
        k.d,
        k.c,
        k.eta
    ));
    Ok(())
}

fn build(
    s: &mut Session,
    system: &Path,
    m: usize,
    out: &Path,
    certificate: Option<&Path>,
) -> CliResult<()> {
    let (sys, _) = s.load_system(system)?;
    let basis = FockBasis::new(sys.n_vars(), m)?;
    let h = build_hamiltonian(&sys, &basis)?;
    let mut csv = Vec::new();
    write_csv(&h, sys.n_vars(), m, &mut csv)?;
    s.write(out, &csv)?;
    let cert = norm_certificate(&h, &sys, &basis);
    let json = serde_json::to_string_pretty(&json!({
        "N": sys.n_vars(),
        "m": m,
        "M": basis.dim(),
        "nnz": h.nnz(),
        "passes": cert.passes(),
        "certificate": cert,
    }))
    .expect("certificate is plain JSON")
        + "\n";
    s.emit(certificate, json.into_bytes())?;
    if cert.passes() {
        Ok(())
    } else {
        Err(CliError::Validation("norm certificate failed".into()))
    }
}

/// System and initial point after `--x0` and `--delta` are applied.
fn prepare(s: &mut Session, run: &RunArgs) -> CliResult<(OdeSystem, Vec<f64>)> {
    let (sys, file) = s.load_system(&run.system)?;
    let x0 = run.x0.clone().or(file.x0).ok_or_else(|| {
        CliError::Usage("no initial point: pass --x0 or add x0 to the system file".into())
    })?;
    if x0.len() != sys.n_vars() {
        return Err(CliError::Usage(format!(
            "x0 has {} values, system has {} variables",
            x0.len(),
            sys.n_vars()
        )));
    }
    match run.delta {
        Some(delta) => Ok(sys.rescale(&x0, delta)?),
        None => Ok((sys, x0)),
    }
}

fn evolve_cmd(
    s: &mut Session,
    run: &RunArgs,
    m: usize,
    observable: Option<&Path>,
) -> CliResult<()> {
    let (sys, x0) = prepare(s, run)?;
    let obs = observable.map(|p| s.load_observable(p)).transpose()?;
    let opts = EvolveOptions::new(run.tol)?;
    let grid = uniform_grid(run.t, run.steps)?;
    let basis = FockBasis::new(sys.n_vars(), m)?;
    let h = build_hamiltonian(&sys, &basis)?;
    let (psi0, l0) = encode_position(&basis, &x0)?;
    let c = obs
        .as_ref()
        .map(|o| encode_observable(&basis, o))
        .transpose()?;
    let sqrt_l = l0.sqrt();
    let mut outputs = Vec::with_capacity(grid.len());
    let (norms, _) = evolve_streaming(&h, &psi0, &grid, &opts, |_, psi| {
        if let Some(c) = &c {
            outputs.push(c.inner(psi)? * sqrt_l);
        }
        Ok(())
    })?;
    let norm0 = psi0.norm();
    let mut csv = String::new();
    csv.push_str(if c.is_some() {
        "t,norm,norm_drift,quantum,quantum_imag\n"
    } else {
        "t,norm,norm_drift\n"
    });
    for (k, (t, n)) in grid.iter().zip(&norms).enumerate() {
        csv.push_str(&format!("{t:.16e},{n:.16e},{:.16e}", (n - norm0).abs()));
        if let Some(q) = outputs.get(k) {
            csv.push_str(&format!(",{:.16e},{:.16e}", q.re, q.im));
        }
        csv.push('\n');
    }
    s.emit(run.out.as_deref(), csv.into_bytes())
}

fn compare_cmd(s: &mut Session, run: &RunArgs, m: usize, observable: &Path) -> CliResult<()> {
    let (sys, x0) = prepare(s, run)?;
    let obs = s.load_observable(observable)?;
    let table = compare(&sys, &x0, &obs, m, run.t, run.steps, run.tol)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    s.emit(run.out.as_deref(), csv)?;
    eprintln!(
        "m={} M={} max_error={:.16e} max_norm_drift={:.16e} ‖H‖max·T={:.16e}",
        table.cap,
        table.dim,
        table.max_error(),
        table.max_norm_drift(),
        table.rescaled_horizon
    );
    Ok(())
}

fn sweep(s: &mut Session, run: &RunArgs, m_list: &[usize], observable: &Path) -> CliResult<()> {
    let (sys, x0) = prepare(s, run)?;
    let obs = s.load_observable(observable)?;
    let rows = convergence_sweep(&sys, &x0, &obs, run.t, run.steps, m_list, run.tol)?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    s.emit(run.out.as_deref(), csv)
}

#[allow(clippy::too_many_arguments)]
fn estimate_cmd(
    s: &mut Session,
    system: &Path,
    b: usize,
    eps: f64,
    t: f64,
    rk_order: u32,
    format: Format,
    out: Option<&Path>,
) -> CliResult<()> {
    let (sys, _) = s.load_system(system)?;
    let r = estimate(&sys, b, eps, t, rk_order)?;
    let text = match format {
        Format::Text => estimate_text(&r, rk_order),
        Format::Csv => estimate_csv(&r),
    };
    s.emit(out, text.into_bytes())
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn estimate_text(r: &EstimateReport, rk_order: u32) -> String {
    let (p, c, q) = (&r.truncation, &r.check, &r.resources);
    let rows = [
        ("C", format!("{:.16e}", p.c_const)),
        ("n0", p.n0.to_string()),
        ("m", p.m.to_string()),
        ("delta", format!("{:.16e}", p.delta)),
        ("dim", format!("{:.16e}", q.basis_dim)),
        ("sparsity", format!("{:.16e}", q.sparsity)),
        ("qubits", q.qubits.to_string()),
        ("subnormalization", format!("{:.16e}", q.subnormalization)),
        ("alpha", format!("{:.16e}", opt(q.alpha))),
        ("queries", format!("{:.16e}", opt(q.queries))),
        (
            "first_condition",
            format!(
                "{} ({:.6e} < {:.6e})",
                c.first_ok, c.log_first, c.log_target
            ),
        ),
        (
            "second_condition",
            format!(
                "{} ({:.6e} < {:.6e})",
                c.second_ok, c.log_second, c.log_target
            ),
        ),
        (
            "classical_rk",
            format!("{:.16e} (order {rk_order})", r.classical_baseline),
        ),
    ];
    rows.iter().map(|(k, v)| format!("{k:<18}{v}\n")).collect()
}

fn estimate_csv(r: &EstimateReport) -> String {
    let (p, q) = (&r.truncation, &r.resources);
    format!(
        "n0,m,delta,dim,sparsity,qubits,alpha,queries,classical_rk\n{},{},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}\n",
        p.n0,
        p.m,
        p.delta,
        q.basis_dim,
        q.sparsity,
        q.qubits,
        opt(q.alpha),
        opt(q.queries),
        r.classical_baseline
    )
}
