//! Command-line frontend: every subgroup operation with stable text, JSON,
//! or DOT output.
//!
//! Exit codes: 0 for any computed answer (including `false` and `none`),
//! 2 for usage errors, 3 when a size bound was exceeded or coset
//! enumeration exhausted its rounds.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stallings::constructions::{self, DEFAULT_ENUM_BOUND, DEFAULT_FRINGE_BOUND};
use stallings::coset_enum::{enumerate_cosets, CosetEnumOutcome, Presentation, DEFAULT_MAX_ROUNDS};
use stallings::intersections::{coset_intersection, intersect, is_malnormal, shn_report, Malnormality};
use stallings::subgroup::{is_free_basis, Dependence};
use stallings::words::{format_word, parse_word, Style};
use stallings::{Alphabet, Error, IndexReport, Subgroup, Word};

#[derive(Parser)]
#[command(
    name = "stallings",
    about = "Subgroups of free groups via folded automata",
    version
)]
struct Cli {
    /// Rank of the ambient free group (ignored when --names is given).
    #[arg(short = 'n', long = "rank", global = true, default_value_t = 2)]
    rank: usize,

    /// Generator names, e.g. "xyz" for rank 3.
    #[arg(long, global = true)]
    names: Option<String>,

    /// Output format.
    #[arg(short, long, global = true, value_enum, default_value_t = Format::Text)]
    output: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Free basis of the subgroup generated by -H.
    Basis {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// Rank of the subgroup generated by -H.
    Rank {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// Is WORD a member of the subgroup?
    Member {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        word: String,
    },
    /// Express a member as a word s1..sp over the given generators.
    Express {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        word: String,
    },
    /// Index and coset transversal, or an infinite-index witness.
    Index {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// Is the subgroup normal?
    Normal {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// Are the given words a free basis of the subgroup they generate?
    Free {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// Conjugator taking -H to -K, or "none".
    Conjugate {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        #[arg(short = 'K', value_name = "WORDS")]
        other: String,
    },
    /// The conjugate w⁻¹·H·w of -H by WORD.
    ConjugateBy {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        word: String,
    },
    /// Basis of the intersection of -H and -K.
    Intersect {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        #[arg(short = 'K', value_name = "WORDS")]
        other: String,
    },
    /// Strengthened Hanna Neumann accounting for -H, -K.
    Shn {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        #[arg(short = 'K', value_name = "WORDS")]
        other: String,
    },
    /// Is the subgroup malnormal? Prints a witness when not.
    Malnormal {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// A word in Hu ∩ Kv, or "none".
    CosetIntersect {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        #[arg(short = 'u', value_name = "WORD")]
        u: String,
        #[arg(short = 'K', value_name = "WORDS")]
        other: String,
        #[arg(short = 'v', value_name = "WORD")]
        v: String,
    },
    /// Relators between the given generators (one per closed folding).
    Present {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// Is WORD dependent on the subgroup? Prints the ideal's equations.
    Depends {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        word: String,
    },
    /// All quotient subgroups of St(H) by vertex partitions.
    Fringe {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        #[arg(long, default_value_t = DEFAULT_FRINGE_BOUND)]
        max_vertices: usize,
    },
    /// Image of -H inside -K (requires H ≤ K).
    Image {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        #[arg(short = 'K', value_name = "WORDS")]
        other: String,
    },
    /// Number of subgroups of index k (Hall's recursion).
    CountIndex {
        #[arg(short = 'k', value_name = "INDEX")]
        k: usize,
    },
    /// Enumerate all subgroups of index k as JSON lines.
    EnumIndex {
        #[arg(short = 'k', value_name = "INDEX")]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_ENUM_BOUND)]
        bound: u64,
    },
    /// A subgroup of index |w|+1 avoiding WORD.
    Avoid { word: String },
    /// Finite-index overgroup of -H (as free factor) avoiding --avoid.
    Envelope {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
        #[arg(long, value_name = "WORDS")]
        avoid: Option<String>,
    },
    /// Coset enumeration for a finitely presented quotient.
    ///
    /// FILE holds the presentation: generator names on the first line, one
    /// relator per following line. Subgroup generators come from -S.
    CosetEnum {
        file: String,
        #[arg(short = 'S', value_name = "WORDS", default_value = "")]
        subgroup: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
    },
    /// DOT rendering of St(H).
    Dot {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
    /// JSON rendering of St(H).
    Json {
        #[arg(short = 'H', value_name = "WORDS")]
        subgroup: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::BoundExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn alphabet(cli: &Cli) -> Result<Alphabet, Error> {
    match &cli.names {
        Some(names) => Alphabet::with_names(names.chars().collect()),
        None => Alphabet::new(cli.rank),
    }
}

/// Parses a comma/whitespace-separated word list; `@path` reads a file.
fn parse_words(spec: &str, alphabet: &Alphabet) -> Result<Vec<Word>, Error> {
    let text = if let Some(path) = spec.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidAutomaton(format!("cannot read {path}: {e}")))?
    } else {
        spec.to_string()
    };
    text.split(|c: char| c == ',' || c == '\n')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_word(s, alphabet))
        .collect()
}

fn subgroup(spec: &str, alphabet: &Alphabet) -> Result<Subgroup, Error> {
    Ok(Subgroup::stallings(
        &parse_words(spec, alphabet)?,
        alphabet.clone(),
    ))
}

/// Compact form with the empty word shown as `e`.
fn show(word: &Word, alphabet: &Alphabet) -> String {
    if word.is_empty() {
        "e".to_string()
    } else {
        format_word(word, Style::Compact, alphabet)
    }
}

/// Words over abstract symbols: `s1 s2^-1` style.
fn show_symbols(word: &Word, symbol: impl Fn(usize) -> String) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    let mut parts = Vec::new();
    for &l in word.letters() {
        if l.is_positive() {
            parts.push(symbol(l.index()));
        } else {
            parts.push(format!("{}^-1", symbol(l.index())));
        }
    }
    parts.join(" ")
}

fn print_subgroup(sg: &Subgroup, cli: &Cli, alphabet: &Alphabet) {
    match cli.output {
        Format::Text => {
            for word in sg.basis() {
                println!("{}", show(&word, alphabet));
            }
        }
        Format::Json => println!("{}", sg.automaton().to_json()),
        Format::Dot => print!("{}", sg.automaton().to_dot()),
    }
}

fn print_bool(value: bool, cli: &Cli) {
    match cli.output {
        Format::Json => println!("{}", serde_json::json!({ "result": value })),
        _ => println!("{value}"),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let alphabet = alphabet(cli)?;
    match &cli.command {
        Command::Basis { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            print_subgroup(&sg, cli, &alphabet);
        }
        Command::Rank { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            match cli.output {
                Format::Json => println!("{}", serde_json::json!({ "rank": sg.rank() })),
                _ => println!("{}", sg.rank()),
            }
        }
        Command::Member {
            subgroup: spec,
            word,
        } => {
            let sg = subgroup(spec, &alphabet)?;
            let w = parse_word(word, &alphabet)?;
            print_bool(sg.contains(&w), cli);
        }
        Command::Express {
            subgroup: spec,
            word,
        } => {
            let sg = subgroup(spec, &alphabet)?;
            let w = parse_word(word, &alphabet)?;
            let expr = sg.express(&w)?;
            match cli.output {
                Format::Json => {
                    let parts: Vec<String> = expr
                        .letters()
                        .iter()
                        .map(|l| {
                            format!("s{}{}", l.index() + 1, if l.is_positive() { "" } else { "^-1" })
                        })
                        .collect();
                    println!("{}", serde_json::json!({ "expression": parts }));
                }
                _ => println!("{}", show_symbols(&expr, |i| format!("s{}", i + 1))),
            }
        }
        Command::Index { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            match sg.index() {
                IndexReport::Finite { index, transversal } => {
                    let reps: Vec<String> =
                        transversal.iter().map(|w| show(w, &alphabet)).collect();
                    match cli.output {
                        Format::Json => println!(
                            "{}",
                            serde_json::json!({ "index": index, "transversal": reps })
                        ),
                        _ => println!("{index}: {}", reps.join(", ")),
                    }
                }
                IndexReport::Infinite { witness } => {
                    let (vertex, letter) = witness;
                    let name = alphabet.name(letter.index());
                    let label = if letter.is_positive() {
                        name.to_string()
                    } else {
                        format!("{name}^-1")
                    };
                    match cli.output {
                        Format::Json => println!(
                            "{}",
                            serde_json::json!({
                                "index": null,
                                "witness": { "vertex": vertex.0, "letter": label }
                            })
                        ),
                        _ => println!("infinite: vertex {} has no arc for {label}", vertex.0),
                    }
                }
            }
        }
        Command::Normal { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            print_bool(sg.is_normal(), cli);
        }
        Command::Free { subgroup: spec } => {
            let words = parse_words(spec, &alphabet)?;
            print_bool(is_free_basis(&words, &alphabet), cli);
        }
        Command::Conjugate {
            subgroup: spec,
            other,
        } => {
            let h = subgroup(spec, &alphabet)?;
            let k = subgroup(other, &alphabet)?;
            match h.conjugator(&k)? {
                Some(w) => match cli.output {
                    Format::Json => println!(
                        "{}",
                        serde_json::json!({ "conjugator": format_word(&w, Style::Compact, &alphabet) })
                    ),
                    _ => println!("{}", show(&w, &alphabet)),
                },
                None => match cli.output {
                    Format::Json => println!("{}", serde_json::json!({ "conjugator": null })),
                    _ => println!("none"),
                },
            }
        }
        Command::ConjugateBy {
            subgroup: spec,
            word,
        } => {
            let h = subgroup(spec, &alphabet)?;
            let w = parse_word(word, &alphabet)?;
            print_subgroup(&h.conjugate(&w), cli, &alphabet);
        }
        Command::Intersect {
            subgroup: spec,
            other,
        } => {
            let h = subgroup(spec, &alphabet)?;
            let k = subgroup(other, &alphabet)?;
            print_subgroup(&intersect(&h, &k)?, cli, &alphabet);
        }
        Command::Shn {
            subgroup: spec,
            other,
        } => {
            let h = subgroup(spec, &alphabet)?;
            let k = subgroup(other, &alphabet)?;
            let report = shn_report(&h, &k)?;
            match cli.output {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "terms": report.terms,
                        "lhs_sum": report.lhs_sum,
                        "mineyev_bound": report.mineyev_bound,
                        "hn_bound": report.hn_bound,
                    })
                ),
                _ => {
                    let mut text = String::new();
                    let terms: Vec<String> =
                        report.terms.iter().map(|t| t.to_string()).collect();
                    let _ = writeln!(text, "terms: {}", terms.join(", "));
                    let _ = writeln!(text, "lhs_sum: {}", report.lhs_sum);
                    let _ = writeln!(text, "mineyev_bound: {}", report.mineyev_bound);
                    let _ = write!(text, "hn_bound: {}", report.hn_bound);
                    println!("{text}");
                }
            }
        }
        Command::Malnormal { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            match is_malnormal(&sg)? {
                Malnormality::Malnormal => print_bool(true, cli),
                Malnormality::NotMalnormal { witness } => match cli.output {
                    Format::Json => println!(
                        "{}",
                        serde_json::json!({
                            "result": false,
                            "witness": format_word(&witness, Style::Compact, &alphabet)
                        })
                    ),
                    _ => {
                        println!("false");
                        println!("witness: {}", show(&witness, &alphabet));
                    }
                },
            }
        }
        Command::CosetIntersect {
            subgroup: spec,
            u,
            other,
            v,
        } => {
            let h = subgroup(spec, &alphabet)?;
            let k = subgroup(other, &alphabet)?;
            let u = parse_word(u, &alphabet)?;
            let v = parse_word(v, &alphabet)?;
            match coset_intersection(&h, &u, &k, &v)? {
                Some(w) => match cli.output {
                    Format::Json => println!(
                        "{}",
                        serde_json::json!({ "representative": format_word(&w, Style::Compact, &alphabet) })
                    ),
                    _ => println!("{}", show(&w, &alphabet)),
                },
                None => match cli.output {
                    Format::Json => println!("{}", serde_json::json!({ "representative": null })),
                    _ => println!("none"),
                },
            }
        }
        Command::Present { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            let rels = sg.presentation();
            match cli.output {
                Format::Json => {
                    let list: Vec<String> = rels
                        .iter()
                        .map(|r| show_symbols(r, |i| format!("s{}", i + 1)))
                        .collect();
                    println!("{}", serde_json::json!({ "relators": list }));
                }
                _ => {
                    for r in &rels {
                        println!("{}", show_symbols(r, |i| format!("s{}", i + 1)));
                    }
                }
            }
        }
        Command::Depends {
            subgroup: spec,
            word,
        } => {
            let sg = subgroup(spec, &alphabet)?;
            let w = parse_word(word, &alphabet)?;
            let n = sg.rank();
            let name = move |i: usize| {
                if i == n {
                    "X".to_string()
                } else {
                    format!("h{}", i + 1)
                }
            };
            match sg.dependence(&w) {
                Dependence::Independent => match cli.output {
                    Format::Json => println!("{}", serde_json::json!({ "dependent": false })),
                    _ => println!("independent"),
                },
                Dependence::Dependent { equations } => match cli.output {
                    Format::Json => {
                        let list: Vec<String> =
                            equations.iter().map(|e| show_symbols(e, &name)).collect();
                        println!(
                            "{}",
                            serde_json::json!({ "dependent": true, "equations": list })
                        );
                    }
                    _ => {
                        println!("dependent");
                        for eq in &equations {
                            println!("{}", show_symbols(eq, &name));
                        }
                    }
                },
            }
        }
        Command::Fringe {
            subgroup: spec,
            max_vertices,
        } => {
            let sg = subgroup(spec, &alphabet)?;
            let members = constructions::fringe(&sg, *max_vertices)?;
            match cli.output {
                Format::Json => {
                    for m in &members {
                        println!("{}", m.automaton().to_json());
                    }
                }
                _ => {
                    for m in &members {
                        let words: Vec<String> =
                            m.basis().iter().map(|w| show(w, &alphabet)).collect();
                        println!("rank {}: {}", m.rank(), words.join(", "));
                    }
                }
            }
        }
        Command::Image {
            subgroup: spec,
            other,
        } => {
            let h = subgroup(spec, &alphabet)?;
            let k = subgroup(other, &alphabet)?;
            print_subgroup(&h.image_in(&k)?, cli, &alphabet);
        }
        Command::CountIndex { k } => {
            let count = constructions::count_index(alphabet.rank(), *k);
            match cli.output {
                Format::Json => println!("{}", serde_json::json!({ "count": count.to_string() })),
                _ => println!("{count}"),
            }
        }
        Command::EnumIndex { k, bound } => {
            let entries = constructions::enumerate_index(alphabet.rank(), *k, *bound)?;
            for entry in &entries {
                println!("{}", entry.to_json());
            }
        }
        Command::Avoid { word } => {
            let w = parse_word(word, &alphabet)?;
            print_subgroup(&constructions::avoid_element(&w, &alphabet)?, cli, &alphabet);
        }
        Command::Envelope {
            subgroup: spec,
            avoid,
        } => {
            let h = subgroup(spec, &alphabet)?;
            let avoid_words = match avoid {
                Some(list) => parse_words(list, &alphabet)?,
                None => Vec::new(),
            };
            print_subgroup(
                &constructions::finite_index_envelope(&h, &avoid_words)?,
                cli,
                &alphabet,
            );
        }
        Command::CosetEnum {
            file,
            subgroup: spec,
            max_rounds,
        } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| Error::InvalidAutomaton(format!("cannot read {file}: {e}")))?;
            let presentation = Presentation::parse(&text)?;
            let gens = parse_words(spec, &presentation.alphabet)?;
            match enumerate_cosets(&presentation, &gens, *max_rounds)? {
                CosetEnumOutcome::Finite {
                    index, transversal, ..
                } => {
                    let reps: Vec<String> = transversal
                        .iter()
                        .map(|w| show(w, &presentation.alphabet))
                        .collect();
                    match cli.output {
                        Format::Json => println!(
                            "{}",
                            serde_json::json!({ "index": index, "transversal": reps })
                        ),
                        _ => println!("{index}: {}", reps.join(", ")),
                    }
                }
                CosetEnumOutcome::Exhausted {
                    rounds,
                    last_vertex_count,
                } => {
                    eprintln!(
                        "exhausted after {rounds} rounds ({last_vertex_count} vertices); \
                         the index may be infinite"
                    );
                    return Ok(ExitCode::from(3));
                }
            }
        }
        Command::Dot { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            print!("{}", sg.automaton().to_dot());
        }
        Command::Json { subgroup: spec } => {
            let sg = subgroup(spec, &alphabet)?;
            println!("{}", sg.automaton().to_json());
        }
    }
    Ok(ExitCode::SUCCESS)
}
