//! The `pda` command line.
//!
//! Exit codes: 0 on success, 1 when an operation fails or an array does not
//! verify or certify, 2 on bad usage.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::bounds::{
    best_lower_bound, closed_form_bound, f_minus_2_bound, improved_bound, recursive_bound, simple_bound, square_bound,
    BoundReport,
};
use crate::constructions::{block_diagonal, hconcat, Builtin, Family, Orientation, FAMILY_INDEX};
use crate::format::{check_header, parse_raw, to_text, MAGIC};
use crate::pda::{verify_with, Grid, Pda, ReportMode};
use crate::search::{
    certify_optimal, exhaustive_min_s, exists_pda, CertificateKind, CertifyConfig, MinS, Outcome, SearchConfig,
};
use crate::sim::{simulate, DemandMode, SimConfig, DEFAULT_PACKET_BYTES};

#[derive(Parser, Debug)]
#[command(name = "pda", version, about = "Placement delivery arrays for coded caching")]
struct Cli {
    /// Line-oriented key=value output.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct FamilyArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of users.
    #[arg(long = "K")]
    users: Option<usize>,
    /// Packets per file.
    #[arg(long = "F")]
    packets: Option<usize>,
}

#[derive(Args, Debug)]
struct Instance {
    #[arg(long = "K")]
    users: usize,
    #[arg(long = "F")]
    packets: usize,
    #[arg(long = "Z")]
    stars: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a PDA from a family (`construct list` shows them all).
    Construct {
        family: String,
        /// Builtin array name.
        name: Option<String>,
        #[command(flatten)]
        args: FamilyArgs,
    },
    /// Check C1 and C2; exits 1 on any violation.
    Verify {
        input: String,
        /// Report every offending pair instead of one per code.
        #[arg(long)]
        all: bool,
    },
    /// Transpose a PDA whose rows all hold the same number of stars.
    Transpose { input: String },
    /// Side-by-side join, codes offset per part.
    Concat {
        #[arg(required = true)]
        inputs: Vec<String>,
    },
    /// Block-diagonal join with shared codes.
    Blockdiag {
        #[arg(required = true)]
        inputs: Vec<String>,
    },
    /// Delete the listed columns (or the last `--kappa`) and renumber codes.
    DeleteCols {
        input: String,
        columns: Vec<usize>,
        #[arg(long)]
        kappa: Option<usize>,
    },
    /// Best lower bound on S for (K, F, Z).
    Bound {
        #[command(flatten)]
        instance: Instance,
        /// Also list every individual bound.
        #[arg(long)]
        all: bool,
    },
    /// Exact search: minimum S, or a single S with `--S`.
    Search {
        #[command(flatten)]
        instance: Instance,
        #[arg(long = "S")]
        s: Option<usize>,
        #[arg(long = "max-s")]
        max_s: Option<usize>,
        #[arg(long = "node-budget")]
        node_budget: Option<u64>,
    },
    /// Prove a PDA optimal, show it is not, or report the open bracket.
    Certify {
        input: String,
        #[arg(long = "node-budget")]
        node_budget: Option<u64>,
    },
    /// Run placement, delivery and decoding on random files.
    Simulate {
        input: String,
        /// Number of files N (default: K).
        #[arg(long)]
        files: Option<usize>,
        #[arg(long = "packet-bytes", default_value_t = DEFAULT_PACKET_BYTES)]
        packet_bytes: usize,
        /// `all` or a sample size (default: all when N^K <= 4096, else 1000).
        #[arg(long)]
        demands: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Show a PDA with its parameters, rate and memory ratio.
    Print { input: String },
}

enum CliError {
    Usage(String),
    Failed(String),
}

type CmdResult = Result<i32, CliError>;

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: String,
    machine: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        let mut text = String::new();
        if path == "-" {
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| failed(format!("reading standard input: {e}")))?;
        } else {
            text = std::fs::read_to_string(path).map_err(|e| failed(format!("reading {path}: {e}")))?;
        }
        Ok(text)
    }

    /// A grid from either the headed file format or bare rows.
    fn grid(&mut self, path: &str) -> Result<(Grid, Option<crate::format::Header>), CliError> {
        let text = self.read(path)?;
        if text.trim_start().starts_with(MAGIC) {
            let (header, grid) = parse_raw(&text).map_err(|e| failed(format!("{path}: {e}")))?;
            Ok((grid, Some(header)))
        } else {
            let grid = text.parse().map_err(|e| failed(format!("{path}: {e}")))?;
            Ok((grid, None))
        }
    }

    fn pda(&mut self, path: &str) -> Result<Pda, CliError> {
        let (grid, header) = self.grid(path)?;
        let pda = Pda::new(grid).map_err(|e| failed(format!("{path}: {e}")))?;
        if let Some(h) = header {
            check_header(&h, &pda).map_err(|e| failed(format!("{path}: {e}")))?;
        }
        Ok(pda)
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        out: String::new(),
        machine: cli.machine,
    };
    let result = dispatch(cli.command, &mut io);
    let _ = stdout.write_all(io.out.as_bytes());
    match result {
        Ok(code) => code,
        Err(CliError::Failed(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}\n\n{}", Cli::command().render_usage());
            2
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> CmdResult {
    match command {
        Command::Construct { family, name, args } => construct(io, &family, name.as_deref(), &args),
        Command::Verify { input, all } => verify_cmd(io, &input, all),
        Command::Transpose { input } => {
            let p = io.pda(&input)?;
            let t = p.transpose().map_err(failed)?;
            io.out.push_str(&to_text(&t));
            Ok(0)
        }
        Command::Concat { inputs } => join(io, &inputs, hconcat),
        Command::Blockdiag { inputs } => join(io, &inputs, block_diagonal),
        Command::DeleteCols { input, columns, kappa } => {
            let p = io.pda(&input)?;
            let out = match (kappa, columns.is_empty()) {
                (Some(count), true) => p.delete_last_columns(count),
                (None, false) => p.delete_columns(&columns.into_iter().collect::<BTreeSet<_>>()),
                _ => return Err(CliError::Usage("give either column indices or --kappa".into())),
            }
            .map_err(failed)?;
            io.out.push_str(&to_text(&out));
            Ok(0)
        }
        Command::Bound { instance, all } => bound_cmd(io, &instance, all),
        Command::Search {
            instance,
            s,
            max_s,
            node_budget,
        } => search_cmd(io, &instance, s, max_s, node_budget),
        Command::Certify { input, node_budget } => certify_cmd(io, &input, node_budget),
        Command::Simulate {
            input,
            files,
            packet_bytes,
            demands,
            seed,
        } => simulate_cmd(io, &input, files, packet_bytes, demands.as_deref(), seed),
        Command::Print { input } => print_cmd(io, &input),
    }
}

fn need(value: Option<usize>, flag: &str, family: &str) -> Result<usize, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("family {family} needs {flag}")))
}

fn family_from(id: &str, name: Option<&str>, a: &FamilyArgs) -> Result<Family, CliError> {
    let family = match id {
        "an" | "an-pda" => Family::AnPda {
            k: need(a.k, "--k", id)?,
            t: need(a.t, "--t", id)?,
        },
        "an-transpose" => Family::AnTranspose {
            k: need(a.k, "--k", id)?,
            t: need(a.t, "--t", id)?,
        },
        "hconcat-repeat" => Family::HconcatRepeat {
            k: need(a.k, "--k", id)?,
            t: need(a.t, "--t", id)?,
            m: need(a.m, "--m", id)?,
        },
        "block-diagonal" => Family::BlockDiagonal {
            k: need(a.k, "--k", id)?,
            t: need(a.t, "--t", id)?,
            m: need(a.m, "--m", id)?,
        },
        "z-one" => Family::ZOne {
            k: need(a.users, "--K", id)?,
            f: need(a.packets, "--F", id)?,
        },
        "z-f-minus-1" => Family::ZFMinus1 {
            k: need(a.users, "--K", id)?,
            f: need(a.packets, "--F", id)?,
        },
        "z-f-minus-2" => Family::ZFMinus2 {
            k: need(a.users, "--K", id)?,
            f: need(a.packets, "--F", id)?,
        },
        "z-f-minus-3" => Family::ZFMinus3 {
            f: need(a.packets, "--F", id)?,
        },
        "comb" => Family::Comb {
            n: need(a.n, "--n", id)?,
        },
        "deleted-blocks-rows" | "deleted-blocks-columns" => Family::DeletedBlocks {
            orientation: if id.ends_with("rows") {
                Orientation::Rows
            } else {
                Orientation::Columns
            },
            k: need(a.k, "--k", id)?,
            m: need(a.m, "--m", id)?,
            kappa: need(a.kappa, "--kappa", id)?,
        },
        "z0-family-1" | "z0-family-2" | "z0-family-3" | "z0-family-4" => Family::Z0 {
            variant: id.as_bytes()[id.len() - 1] - b'0',
            m: need(a.m, "--m", id)?,
            k: need(a.k, "--k", id)?,
        },
        "builtin" => {
            let name = name.ok_or_else(|| CliError::Usage("builtin needs a name: P4, P6, P7 or P86".into()))?;
            Family::Builtin(name.parse::<Builtin>().map_err(CliError::Usage)?)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown family {other:?}; run `pda construct list`"
            )))
        }
    };
    if name.is_some() && id != "builtin" {
        return Err(CliError::Usage(format!("family {id} takes no positional name")));
    }
    Ok(family)
}

fn construct(io: &mut Io, id: &str, name: Option<&str>, args: &FamilyArgs) -> CmdResult {
    if id == "list" {
        let width = FAMILY_INDEX.iter().map(|e| e.0.len()).max().unwrap_or(0);
        for (fid, flags, desc) in FAMILY_INDEX {
            if io.machine {
                io.line(format!("family={fid} flags=\"{flags}\" description=\"{desc}\""));
            } else {
                io.line(format!("{fid:width$}  {flags:18}  {desc}"));
            }
        }
        return Ok(0);
    }
    let family = family_from(id, name, args)?;
    let p = family.build().map_err(failed)?;
    io.out.push_str(&to_text(&p));
    Ok(0)
}

fn verify_cmd(io: &mut Io, input: &str, all: bool) -> CmdResult {
    let (grid, header) = io.grid(input)?;
    let mode = if all { ReportMode::All } else { ReportMode::FirstPerCode };
    let report = verify_with(&grid, mode);
    let mut header_problem = None;
    if report.valid {
        if let Some(h) = header {
            let p = Pda::new(grid.clone()).expect("verified");
            header_problem = check_header(&h, &p).err();
        }
    }
    let ok = report.valid && header_problem.is_none();
    if io.machine {
        io.line(format!(
            "valid={} K={} F={} Z={} S={} violations={}",
            ok,
            report.k,
            report.f,
            report.z,
            report.s,
            report.violations.len()
        ));
        for v in &report.violations {
            io.line(format!("violation rule={} detail=\"{v}\"", v.rule()));
        }
    } else {
        io.line(report.to_string());
        if report.violations.len() > 1 {
            for v in &report.violations {
                io.line(format!("  {v}"));
            }
        }
    }
    if let Some(e) = header_problem {
        io.line(format!("header mismatch: {e}"));
    }
    Ok(if ok { 0 } else { 1 })
}

fn join(
    io: &mut Io,
    inputs: &[String],
    op: fn(&[Pda]) -> Result<Pda, crate::constructions::ConstructionError>,
) -> CmdResult {
    let parts = inputs.iter().map(|p| io.pda(p)).collect::<Result<Vec<_>, _>>()?;
    let out = op(&parts).map_err(failed)?;
    io.out.push_str(&to_text(&out));
    Ok(0)
}

fn check_instance(i: &Instance) -> Result<(u64, u64, u64), CliError> {
    if i.users == 0 || i.packets == 0 {
        return Err(failed("K and F must be positive"));
    }
    if i.stars > i.packets {
        return Err(failed(format!("Z={} exceeds F={}", i.stars, i.packets)));
    }
    Ok((i.users as u64, i.packets as u64, i.stars as u64))
}

fn chain(report: &BoundReport) -> String {
    report
        .chain
        .iter()
        .map(|(s, v)| format!("{s}:{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn terms(report: &BoundReport) -> String {
    report.terms.iter().map(u64::to_string).collect::<Vec<_>>().join("+")
}

fn bound_cmd(io: &mut Io, instance: &Instance, all: bool) -> CmdResult {
    let (k, f, z) = check_instance(instance)?;
    let best = best_lower_bound(k, f, z);
    io.line(format!("lower={} source={}", best.value, best.source));
    if io.machine {
        io.line(format!("terms={}", terms(&best)));
        io.line(format!("chain={}", chain(&best)));
    } else if best.terms.len() > 1 {
        io.line(format!("  = {}", terms(&best)));
    }
    if all {
        let show = |r: Option<BoundReport>| r.map_or("n/a".to_string(), |r| r.value.to_string());
        let rows = [
            ("recursive", show(Some(recursive_bound(k, f, z)))),
            ("simple", show(Some(simple_bound(k, f, z)))),
            ("improved", show(improved_bound(k, f, z))),
            ("f-minus-2", show((z + 2 == f).then(|| f_minus_2_bound(k, f)).flatten())),
            ("square", show((k == f).then(|| square_bound(f, z)).flatten())),
            ("closed-form", show(Some(closed_form_bound(k, f, z)))),
        ];
        for (name, value) in rows {
            if io.machine {
                io.line(format!("{name}={value}"));
            } else {
                io.line(format!("  {name:12} {value}"));
            }
        }
    }
    Ok(0)
}

fn search_cmd(io: &mut Io, i: &Instance, s: Option<usize>, max_s: Option<usize>, budget: Option<u64>) -> CmdResult {
    check_instance(i)?;
    let mut cfg = SearchConfig::new(i.users, i.packets, i.stars).parallel(true);
    cfg.node_budget = budget;
    cfg.s_max = max_s;
    match s {
        Some(s) => {
            let r = exists_pda(&cfg, s);
            match r.outcome {
                Outcome::Found(p) => {
                    io.line(format!("result=found S={s} nodes={}", r.nodes));
                    io.out.push_str(&to_text(&p));
                    Ok(0)
                }
                Outcome::Infeasible => {
                    io.line(format!("result=none S={s} nodes={}", r.nodes));
                    Ok(0)
                }
                Outcome::BudgetExceeded => {
                    io.line(format!("result=budget-exceeded S={s} nodes={}", r.nodes));
                    Ok(1)
                }
            }
        }
        None => match exhaustive_min_s(&cfg) {
            MinS::Exact { s, witness, nodes } => {
                io.line(format!("result=exact S={s} nodes={nodes}"));
                io.out.push_str(&to_text(&witness));
                Ok(0)
            }
            MinS::Undecided { lower, upper, nodes } => {
                io.line(format!("result=undecided lower={lower} upper={upper} nodes={nodes}"));
                Ok(1)
            }
        },
    }
}

fn certify_cmd(io: &mut Io, input: &str, budget: Option<u64>) -> CmdResult {
    let p = io.pda(input)?;
    let mut cfg = CertifyConfig {
        parallel: true,
        ..CertifyConfig::default()
    };
    if budget.is_some() {
        cfg.node_budget = budget;
    }
    let c = certify_optimal(&p, &cfg);
    let verdict = match c.kind {
        CertificateKind::BoundMatched | CertificateKind::SearchExhaustive => "optimal",
        CertificateKind::Improvable => "not-optimal",
        CertificateKind::Undecided => "undecided",
    };
    io.line(format!(
        "{verdict} kind={} lower={} achieved={}",
        c.kind.id(),
        c.lower.value,
        c.achieved
    ));
    if io.machine {
        io.line(format!("source={}", c.lower.source));
        io.line(format!("chain={}", chain(&c.lower)));
        io.line(format!("nodes={}", c.nodes));
    } else {
        let mut detail = format!("  lower bound {} from {}", c.lower.value, c.lower.source);
        if c.nodes > 0 {
            let _ = write!(detail, "; search explored {} nodes", c.nodes);
        }
        io.line(detail);
    }
    if let Some(w) = &c.witness {
        if !io.machine {
            io.line(format!("  a PDA with S={} exists:", w.s()));
        }
        io.out.push_str(&to_text(w));
    }
    Ok(if c.is_optimal() { 0 } else { 1 })
}

fn simulate_cmd(
    io: &mut Io,
    input: &str,
    files: Option<usize>,
    packet_bytes: usize,
    demands: Option<&str>,
    seed: u64,
) -> CmdResult {
    let p = io.pda(input)?;
    let files = files.unwrap_or(p.k());
    if files == 0 {
        return Err(failed("--files must be positive"));
    }
    let mode = match demands {
        Some("all") => DemandMode::All,
        Some(n) => DemandMode::Sample(
            n.parse()
                .map_err(|_| CliError::Usage(format!("--demands takes `all` or a count, got {n:?}")))?,
        ),
        None => {
            let total = (files as u64).checked_pow(p.k() as u32);
            if total.is_some_and(|t| t <= 4096) {
                DemandMode::All
            } else {
                DemandMode::Sample(1000)
            }
        }
    };
    if mode == DemandMode::All && (files as u64).checked_pow(p.k() as u32).is_none_or(|t| t > 1 << 24) {
        return Err(failed(format!(
            "N^K = {files}^{} demand vectors is too many; sample instead",
            p.k()
        )));
    }
    let cfg = SimConfig::new(files)
        .packet_bytes(packet_bytes)
        .demands(mode)
        .seed(seed);
    let report = simulate(&p, &cfg).map_err(failed)?;
    if io.machine {
        io.out.push_str(&report.to_machine());
    } else {
        io.out.push_str(&report.to_string());
    }
    Ok(if report.success() { 0 } else { 1 })
}

fn print_cmd(io: &mut Io, input: &str) -> CmdResult {
    let p = io.pda(input)?;
    let (rate, memory) = p.rate_and_memory();
    if io.machine {
        io.line(format!(
            "K={} F={} Z={} S={} rate={rate} memory_ratio={memory}",
            p.k(),
            p.f(),
            p.z(),
            p.s()
        ));
    } else {
        io.line(format!(
            "{} PDA, rate S/F = {rate}, memory M/N = Z/F = {memory}",
            p.params()
        ));
    }
    io.out.push_str(&p.to_string());
    Ok(0)
}
