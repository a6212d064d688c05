use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twograph::graphs::{self, Export, RepGraph, VerifyMode};
use twograph::reps::{self, Decomposition, GroupConstructionRep};
use twograph::search;
use twograph::semigroup::{self, Color};
use twograph::tails::{self, TailSpec};
use twograph::{fixtures, Angle, Error, Theta, Word};

#[derive(Parser)]
#[command(name = "twograph", version, about = "Computations in single-vertex rank-2 graph semigroups")]
struct Cli {
    /// Seed for randomized processing orders.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for searches (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Emit JSON instead of text where a command supports both.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ThetaArg {
    /// Theta file (TOML or JSON) or a fixture name.
    #[arg(long)]
    theta: String,
}

#[derive(Args)]
struct OutArg {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normal form of a word ("e1.f2.e1"), blue letters first.
    Normalize {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        word: String,
        /// Put red letters first instead.
        #[arg(long)]
        f_first: bool,
    },
    /// Product w1 w2 in normal form.
    Multiply {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
    },
    /// Whether e_u f_v = f_v e_u.
    Commute {
        #[command(flatten)]
        theta: ThetaArg,
        /// Blue word as digits, e.g. 1121212.
        #[arg(long)]
        u: String,
        /// Red word as digits.
        #[arg(long)]
        v: String,
    },
    /// The induced permutation theta' on pairs of words.
    ThetaPrime {
        #[command(subcommand)]
        cmd: ThetaPrimeCmd,
    },
    /// Build a representation and print it as JSON.
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// Check commutation and scalar consistency of a rep file.
    Validate {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Symmetry lattice of a rep, or eventual symmetry of an alternating tail.
    Symmetry {
        #[arg(long, conflicts_with = "theta")]
        rep: Option<PathBuf>,
        #[arg(long, requires = "tail")]
        theta: Option<String>,
        #[arg(long)]
        tail: Option<String>,
        #[arg(long, default_value_t = 24)]
        horizon: usize,
    },
    /// The character psi on the kernel.
    Psi {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Conjugate per-edge scalars to constants.
    NormalizeScalars {
        #[arg(long)]
        rep: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Irreducible summands (or the parameterized family for infinite H/K).
    Decompose {
        #[arg(long)]
        rep: PathBuf,
        /// Print every summand rep in JSON mode.
        #[arg(long)]
        full: bool,
    },
    /// Unitary equivalence of two finite reps.
    Equivalent {
        #[arg(long)]
        rep1: PathBuf,
        #[arg(long)]
        rep2: PathBuf,
    },
    /// Minimal isometric dilation truncated at a depth.
    Dilate {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Shuffle the completion order with --seed (the result is the same).
        #[arg(long)]
        shuffle: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long = "graph-out")]
        graph_out: Option<PathBuf>,
    },
    /// Type of the component of the base vertex.
    Classify {
        #[command(flatten)]
        src: GraphSource,
    },
    /// Write a graph as DOT or JSON.
    Export {
        #[command(flatten)]
        src: GraphSource,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check degree and commutation invariants of a graph.
    Verify {
        #[command(flatten)]
        src: GraphSource,
        #[arg(long, value_enum, default_value_t = Mode::DefectFree)]
        mode: Mode,
        /// Theta file or fixture; defaults to the theta of --rep.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Number of theta up to relabeling (and e/f exchange).
    IsoClasses {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        swap: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Commuting pair with irreducible summands of at least a given dimension.
    FindPair {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        target: u64,
        #[arg(long = "max-len", default_value_t = 4)]
        max_len: usize,
    },
    /// Alternating tail whose Sigma window has no shift symmetry.
    AperiodicSearch {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long = "max-len", default_value_t = 12)]
        max_len: usize,
    },
    /// List the built-in theta, or write one as TOML.
    Fixtures {
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum ThetaPrimeCmd {
    Apply {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    Cycle {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = semigroup::DEFAULT_TABULATION_CAP)]
        cap: usize,
    },
    /// Cycle type of theta' on all pairs of lengths (k, l).
    Survey {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = semigroup::DEFAULT_TABULATION_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Ring-by-ring rep of a cycle of theta, e.g. --cycle "1,1;1,2;2,1".
    Cycle {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        cycle: String,
        /// The rep on C_k x C_k of the commuting pair read off the cycle.
        #[arg(long)]
        squared: bool,
        #[arg(long, default_value = "0")]
        alpha: Angle,
        #[arg(long, default_value = "0")]
        beta: Angle,
        #[command(flatten)]
        out: OutArg,
    },
    /// Rep on C_k x C_l of a commuting pair.
    Pair {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "0")]
        alpha: Angle,
        #[arg(long, default_value = "0")]
        beta: Angle,
        #[command(flatten)]
        out: OutArg,
    },
    /// Ring-by-tail rep from a blue ring u and a red tail.
    RingTail {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        u: String,
        /// Tail file (JSON) or inline "PRE:PERIOD" digits.
        #[arg(long)]
        tail: String,
        #[arg(long, default_value = "0")]
        alpha: Angle,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sigma window of an alternating tail (JSON).
    #[command(name = "3a")]
    ThreeA {
        #[command(flatten)]
        theta: ThetaArg,
        /// Tail file or inline "e1.f1:e1.f2".
        #[arg(long)]
        tail: String,
        #[arg(long, default_value_t = 8)]
        width: usize,
        #[arg(long, default_value_t = 8)]
        height: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Rep on Z^2/Z(k,l) from the theta'-cycle of (u, v).
    #[command(name = "3bi")]
    ThreeBi {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "0")]
        beta: Angle,
        #[command(flatten)]
        out: OutArg,
    },
    /// Rep on Z^2/Z(k,-l) from block tails, given or generated from (u, v).
    #[command(name = "3bii")]
    ThreeBii {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long, requires_all = ["tau_f", "k", "l"], conflicts_with = "u")]
        tau_e: Option<String>,
        #[arg(long)]
        tau_f: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        /// Generate compatible tails starting from the blocks (u, v).
        #[arg(long, requires = "v")]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        #[arg(long, default_value = "0")]
        beta: Angle,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct GraphSource {
    /// Graph JSON file.
    #[arg(long, conflicts_with = "rep")]
    graph: Option<PathBuf>,
    /// Rep JSON file; strips use --window.
    #[arg(long)]
    rep: Option<PathBuf>,
    /// Row range "LO,HI" for strip reps.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    DefectFree,
    StarInterior,
}

type Res<T> = std::result::Result<T, Error>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load_theta(spec: &str) -> Res<Theta> {
    let p = Path::new(spec);
    if p.exists() {
        return Theta::parse(&read(p)?);
    }
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    fixtures::by_name(spec)
        .or_else(|| fixtures::by_name(stem))
        .ok_or_else(|| Error::Parse(format!("no theta file or fixture named {spec:?}")))
}

fn load_rep(path: &Path) -> Res<GroupConstructionRep> {
    GroupConstructionRep::from_json(&read(path)?)
}

fn digits_or_mixed(s: &str, c: Color) -> Res<Word> {
    if s.contains('e') || s.contains('f') || s == "id" {
        Word::parse_mixed(s)
    } else {
        match c {
            Color::Blue => Word::parse_blue(s),
            Color::Red => Word::parse_red(s),
        }
    }
}

/// A tail file, or inline "PRE:PERIOD".
fn load_tail(s: &str, c: Option<Color>) -> Res<TailSpec> {
    let p = Path::new(s);
    if p.exists() {
        return serde_json::from_str(&read(p)?).map_err(|e| Error::Parse(e.to_string()));
    }
    let (pre, per) = s.split_once(':').unwrap_or(("", s));
    let word = |w: &str| match c {
        Some(c) => digits_or_mixed(w, c),
        None => Word::parse_mixed(w),
    };
    TailSpec::new(word(pre)?, word(per)?)
}

fn parse_cycle(s: &str) -> Res<Vec<(usize, usize)>> {
    s.split(';')
        .map(|pair| {
            let (a, b) = pair
                .trim()
                .trim_matches(|c| c == '(' || c == ')')
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad pair {pair:?}")))?;
            let n = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index {x:?}")));
            Ok((n(a)?, n(b)?))
        })
        .collect()
}

fn load_graph(src: &GraphSource) -> Res<RepGraph> {
    match (&src.graph, &src.rep) {
        (Some(g), _) => RepGraph::from_json(&read(g)?),
        (None, Some(r)) => {
            let rep = load_rep(r)?;
            let window = match &src.window {
                Some(w) => {
                    let (a, b) = w.split_once(',').ok_or_else(|| Error::Parse("window is LO,HI".into()))?;
                    let n = |x: &str| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad row {x:?}")));
                    Some((n(a)?, n(b)?))
                }
                None => None,
            };
            Ok(graphs::graph_of(&rep, window))
        }
        (None, None) => Err(Error::Invalid("give --graph or --rep".into())),
    }
}

fn json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serializable")
}

fn emit_rep(rep: &GroupConstructionRep, out: &Option<PathBuf>) -> Res<()> {
    write_or_print(out, &rep.to_json())
}

fn run(cli: Cli) -> Res<()> {
    let as_json = cli.json;
    match cli.cmd {
        Cmd::Normalize { theta, word, f_first } => {
            let t = load_theta(&theta.theta)?;
            let w = Word::parse_mixed(&word)?;
            w.check_range(&t)?;
            let nf = if f_first {
                semigroup::refactor(&t, &w, &semigroup::f_first(w.degree()))?
            } else {
                semigroup::normal_form(&t, &w)
            };
            println!("{nf}");
        }
        Cmd::Multiply { theta, w1, w2 } => {
            let t = load_theta(&theta.theta)?;
            let (a, b) = (Word::parse_mixed(&w1)?, Word::parse_mixed(&w2)?);
            a.check_range(&t)?;
            b.check_range(&t)?;
            println!("{}", semigroup::multiply(&t, &a, &b));
        }
        Cmd::Commute { theta, u, v } => {
            let t = load_theta(&theta.theta)?;
            println!("{}", semigroup::commutes(&t, &Word::parse_blue(&u)?, &Word::parse_red(&v)?)?);
        }
        Cmd::ThetaPrime { cmd } => match cmd {
            ThetaPrimeCmd::Apply { theta, u, v } => {
                let t = load_theta(&theta.theta)?;
                let (a, b) = semigroup::theta_prime_apply(&t, &Word::parse_blue(&u)?, &Word::parse_red(&v)?)?;
                println!("{} {}", a.digits(), b.digits());
            }
            ThetaPrimeCmd::Cycle { theta, u, v, cap } => {
                let t = load_theta(&theta.theta)?;
                let cyc = semigroup::theta_prime_cycle(&t, &Word::parse_blue(&u)?, &Word::parse_red(&v)?, cap)?;
                if as_json {
                    let pairs: Vec<(String, String)> = cyc.iter().map(|(a, b)| (a.digits(), b.digits())).collect();
                    println!("{}", json(&pairs));
                } else {
                    println!("length {}", cyc.len());
                    for (a, b) in &cyc {
                        println!("{} {}", a.digits(), b.digits());
                    }
                }
            }
            ThetaPrimeCmd::Survey { theta, k, l, cap } => {
                let t = load_theta(&theta.theta)?;
                let table = semigroup::tabulate_theta_prime(&t, k, l, cap)?;
                let mut hist = std::collections::BTreeMap::<usize, usize>::new();
                for c in table.cycle_lengths() {
                    *hist.entry(c).or_default() += 1;
                }
                if as_json {
                    #[derive(Serialize)]
                    struct Survey {
                        k: usize,
                        l: usize,
                        pairs: usize,
                        permutation: bool,
                        cycles: std::collections::BTreeMap<usize, usize>,
                    }
                    let s = Survey { k, l, pairs: table.image.len(), permutation: table.is_permutation(), cycles: hist };
                    println!("{}", json(&s));
                } else {
                    println!("pairs {} permutation {}", table.image.len(), table.is_permutation());
                    for (len, count) in hist {
                        println!("cycles of length {len}: {count}");
                    }
                }
            }
        },
        Cmd::Rep { cmd } => run_rep(cmd)?,
        Cmd::Validate { rep } => {
            load_rep(&rep)?.validate()?;
            println!("ok");
        }
        Cmd::Symmetry { rep, theta, tail, horizon } => {
            let sym = match (rep, theta, tail) {
                (Some(r), _, _) => reps::symmetry_group(&load_rep(&r)?),
                (None, Some(t), Some(tail)) => tails::tail_symmetry(&load_theta(&t)?, &load_tail(&tail, None)?, horizon)?,
                _ => return Err(Error::Invalid("give --rep, or --theta with --tail".into())),
            };
            if as_json {
                println!("{}", json(&sym));
            } else {
                println!("basis {:?}", sym.lattice.basis());
                println!("index {}", sym.lattice.index().map_or("infinite".to_string(), |i| i.to_string()));
                println!("mode {:?}", sym.mode);
            }
        }
        Cmd::Psi { rep } => {
            let psi = reps::scalar_character(&load_rep(&rep)?)?;
            if as_json {
                println!("{}", json(&psi));
            } else {
                for (v, a) in psi.domain.basis().iter().zip(&psi.values) {
                    println!("psi{v:?} = {a}");
                }
            }
        }
        Cmd::NormalizeScalars { rep, out } => {
            let n = reps::normalize_scalars(&load_rep(&rep)?)?;
            write_or_print(&out.out, &json(&n))?;
        }
        Cmd::Decompose { rep, full } => {
            let d = reps::decompose(&load_rep(&rep)?)?;
            match (&d, as_json) {
                (_, true) if full => println!("{}", json(&d)),
                (Decomposition::Summands { symmetry, summands }, true) => {
                    let psis: Vec<_> = summands.iter().map(|s| &s.psi).collect();
                    println!("{}", json(&(symmetry, psis)));
                }
                (Decomposition::Summands { symmetry, summands }, false) => {
                    println!("symmetry {:?}", symmetry.basis());
                    println!("summands {}", summands.len());
                    for s in summands {
                        let vals: Vec<String> = s.psi.values.iter().map(|a| a.to_string()).collect();
                        println!("chi ({}, {}) psi [{}]", s.chi.x, s.chi.y, vals.join(", "));
                    }
                }
                (Decomposition::Family(f), false) => {
                    let (p, q) = (Angle::new(f.bezout.0, f.g), Angle::new(f.bezout.1, f.g));
                    println!("family over chi(t, r) = t*{:?} + r*({p}, {q}), 0 <= r < {}", f.direction, f.g);
                    println!("symmetry {:?} ({:?})", f.symmetry.basis(), f.mode);
                    println!("multiplicity {}", f.multiplicity);
                }
                (Decomposition::Family(f), true) => {
                    #[derive(Serialize)]
                    struct Summary<'a> {
                        kernel: &'a twograph::Sublattice,
                        symmetry: &'a twograph::Sublattice,
                        g: i64,
                        direction: (i64, i64),
                        bezout: (i64, i64),
                        multiplicity: u64,
                    }
                    let s = Summary {
                        kernel: &f.kernel,
                        symmetry: &f.symmetry,
                        g: f.g,
                        direction: f.direction,
                        bezout: f.bezout,
                        multiplicity: f.multiplicity,
                    };
                    println!("{}", json(&s));
                }
            }
        }
        Cmd::Equivalent { rep1, rep2 } => {
            println!("{}", reps::equivalent_reps(&load_rep(&rep1)?, &load_rep(&rep2)?)?);
        }
        Cmd::Dilate { theta, rep, depth, shuffle, dot, graph_out } => {
            let t = load_theta(&theta.theta)?;
            let r = load_rep(&rep)?;
            if r.theta != t {
                return Err(Error::Invalid("rep was built for a different theta".into()));
            }
            let g = graphs::graph_of(&r, None);
            let d = graphs::dilate(&t, &g, depth, shuffle.then_some(cli.seed))?;
            if let Some(p) = &dot {
                write_or_print(&Some(p.clone()), &d.graph.to_dot())?;
            }
            if let Some(p) = &graph_out {
                write_or_print(&Some(p.clone()), &d.graph.to_json())?;
            }
            if as_json {
                println!("{}", json(&d));
            } else {
                let frontier = d.graph.vertices().iter().filter(|v| v.frontier).count();
                println!("vertices {} edges {} frontier {}", d.graph.len(), d.graph.edges().len(), frontier);
                println!("blue rings {:?}", graphs::blue_ring_lengths(&d.graph));
            }
        }
        Cmd::Classify { src } => {
            let v = graphs::classify(&load_graph(&src)?);
            if as_json {
                println!("{}", json(&v));
            } else {
                println!("{}", v.kind);
            }
        }
        Cmd::Export { src, format, out } => {
            let g = load_graph(&src)?;
            let f = match format {
                Format::Dot => Export::Dot,
                Format::Json => Export::Json,
            };
            write_or_print(&out.out, &graphs::export(&g, f))?;
        }
        Cmd::Verify { src, mode, theta } => {
            let g = load_graph(&src)?;
            let t = match (theta, &src.rep) {
                (Some(t), _) => load_theta(&t)?,
                (None, Some(r)) => load_rep(r)?.theta,
                (None, None) => return Err(Error::Invalid("verify of a graph file needs --theta".into())),
            };
            let mode = match mode {
                Mode::DefectFree => VerifyMode::DefectFree,
                Mode::StarInterior => VerifyMode::StarInterior,
            };
            let r = graphs::verify(&t, &g, mode);
            match &r.violation {
                None => println!("ok"),
                Some(v) => return Err(Error::Invalid(format!("vertex {}: {}", v.vertex, v.message))),
            }
        }
        Cmd::IsoClasses { m, n, swap, cap } => {
            let r = search::iso_classes(m, n, swap, cap)?;
            if as_json {
                println!("{}", json(&r));
            } else {
                println!("{}", r.count);
            }
        }
        Cmd::FindPair { theta, target, max_len } => {
            let r = search::find_commuting_pair(&load_theta(&theta.theta)?, target, max_len)?;
            if as_json {
                println!("{}", json(&r));
            } else {
                println!("u {} v {} cycle {}", r.u.digits(), r.v.digits(), r.p);
                println!("long u {}", r.long_u.digits());
                println!("long v {}", r.long_v.digits());
                println!("dimension {}", r.dimension);
            }
        }
        Cmd::AperiodicSearch { theta, max_len } => {
            let r = search::aperiodic_search(&load_theta(&theta.theta)?, max_len)?;
            match (r, as_json) {
                (r, true) => println!("{}", json(&r)),
                (Some(w), false) => println!("witness {} (window {}x{}, radius {})", w.tail, w.window.width, w.window.height, w.radius),
                (None, false) => println!("none within length {max_len}"),
            }
        }
        Cmd::Fixtures { name, out } => match name {
            Some(n) => {
                let t = fixtures::by_name(&n).ok_or_else(|| Error::Invalid(format!("unknown fixture {n:?}")))?;
                write_or_print(&out.out, &t.to_toml_string())?;
            }
            None => {
                for (n, t) in fixtures::all() {
                    println!("{n} {}x{} cycles {:?}", t.m(), t.n(), t.cycles());
                }
            }
        },
    }
    Ok(())
}

fn run_rep(cmd: RepCmd) -> Res<()> {
    match cmd {
        RepCmd::Cycle { theta, cycle, squared, alpha, beta, out } => {
            let t = load_theta(&theta.theta)?;
            let c = parse_cycle(&cycle)?;
            let rep = if squared {
                reps::cycle_squared(&t, &c, alpha, beta)?
            } else {
                reps::from_theta_cycle(&t, &c, alpha, beta)?
            };
            emit_rep(&rep, &out.out)
        }
        RepCmd::Pair { theta, u, v, alpha, beta, out } => {
            let t = load_theta(&theta.theta)?;
            let rep = reps::from_commuting_pair(&t, &Word::parse_blue(&u)?, &Word::parse_red(&v)?, alpha, beta)?;
            emit_rep(&rep, &out.out)
        }
        RepCmd::RingTail { theta, u, tail, alpha, out } => {
            let t = load_theta(&theta.theta)?;
            let rep = reps::build_ring_by_tail(&t, &Word::parse_blue(&u)?, &load_tail(&tail, Some(Color::Red))?, alpha)?;
            emit_rep(&rep, &out.out)
        }
        RepCmd::ThreeA { theta, tail, width, height, dot, out } => {
            let t = load_theta(&theta.theta)?;
            let w = tails::build_inductive_window(&t, &load_tail(&tail, None)?, width, height)?;
            if let Some(p) = dot {
                fs::write(&p, graphs::graph_of_window(&t, &w).to_dot()).map_err(|e| Error::Invalid(e.to_string()))?;
            }
            write_or_print(&out.out, &json(&w))
        }
        RepCmd::ThreeBi { theta, u, v, beta, out } => {
            let t = load_theta(&theta.theta)?;
            emit_rep(&reps::build_3bi(&t, &Word::parse_blue(&u)?, &Word::parse_red(&v)?, beta)?, &out.out)
        }
        RepCmd::ThreeBii { theta, tau_e, tau_f, k, l, u, v, beta, out } => {
            let t = load_theta(&theta.theta)?;
            let (te, tf, k, l) = match (tau_e, tau_f, u, v) {
                (Some(e), Some(f), _, _) => {
                    let (k, l) = k.zip(l).ok_or_else(|| Error::Invalid("block tails need --k and --l".into()))?;
                    (load_tail(&e, Some(Color::Blue))?, load_tail(&f, Some(Color::Red))?, k, l)
                }
                (None, None, Some(u), Some(v)) => {
                    let (u, v) = (Word::parse_blue(&u)?, Word::parse_red(&v)?);
                    let (te, tf) = reps::compatible_tails(&t, &u, &v)?;
                    (te, tf, u.len(), v.len())
                }
                _ => return Err(Error::Invalid("give --tau-e/--tau-f with --k/--l, or --u/--v".into())),
            };
            emit_rep(&reps::build_3bii(&t, &te, &tf, k, l, beta)?, &out.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
