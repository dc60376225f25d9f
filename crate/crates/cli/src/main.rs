mod args;

use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::Parser;

use wfsub::andor::{classify_base, is_free_choice, random_and_or, random_base, BaseClass};
use wfsub::io::{load_net, load_refinement, render_for, write_dot, write_pnml, write_refinement};
use wfsub::refine::{eligible_pairs, place_completion, remove_pair, substitute, transition_completion, Pair};
use wfsub::{
    check_k_sound, check_star_sound_bounded, check_sub_sound_bounded, Border, Marking, NodeId, Outcome,
    SoundnessVerdict, WorkflowNet,
};

use args::{CheckArgs, Cli, Command, GenerateArgs};

const EXIT_ERROR: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// The error chain joined with `: `, skipping causes whose text the library
/// errors already include in their own message.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Check(args) => check(args),
        Command::Substitute { outer, node, inner, output } => {
            let outer = load_net(&outer)?;
            let inner = load_net(&inner)?;
            let result = substitute(&outer, &node_id(&node)?, &inner)?;
            save(&output, &result)
        }
        Command::Complete { net, place, output, .. } => {
            let wf = load_net(&net)?;
            let result = if place { place_completion(&wf)? } else { transition_completion(&wf)? };
            save(&output, &result)
        }
        Command::Reduce { net, tp, pt, list, output } => {
            let wf = load_net(&net)?;
            if list {
                for pair in eligible_pairs(&wf) {
                    println!("{pair}");
                }
                return Ok(0);
            }
            let pair = match (tp, pt) {
                (Some(s), _) => {
                    let (t, p) = split_pair(&s)?;
                    Pair::TransitionPlace(t, p)
                }
                (_, Some(s)) => {
                    let (p, t) = split_pair(&s)?;
                    Pair::PlaceTransition(p, t)
                }
                _ => unreachable!("clap requires one of --tp, --pt, --list"),
            };
            let result = remove_pair(&wf, &pair)?;
            save(&output.expect("clap requires -o without --list"), &result)
        }
        Command::Classify { net } => {
            classify(&load_net(&net)?);
            Ok(0)
        }
        Command::Expand { script, output, unchecked } => {
            let tree = load_refinement(&script)?;
            let result = if unchecked { tree.expand_unchecked()? } else { tree.expand()? };
            save(&output, &result)
        }
        Command::Generate(args) => generate(args),
        Command::Export { net, dot, marking, output, .. } => {
            let wf = load_net(&net)?;
            let text = if dot {
                let marking = marking.as_deref().map(parse_marking).transpose()?;
                write_dot(&wf, marking.as_ref())?
            } else {
                write_pnml(&wf)
            };
            emit(output.as_deref(), &text)
        }
    }
}

fn node_id(s: &str) -> Result<NodeId> {
    Ok(NodeId::new(s.trim())?)
}

fn split_pair(s: &str) -> Result<(NodeId, NodeId)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("expected two ids separated by ',', got {s:?}"))?;
    Ok((node_id(a)?, node_id(b)?))
}

/// `p:2,q:1`; a bare `p` means one token.
fn parse_marking(s: &str) -> Result<Marking> {
    let mut m = Marking::empty();
    for entry in s.split(',').filter(|e| !e.trim().is_empty()) {
        let (place, count) = match entry.rsplit_once(':') {
            Some((p, c)) => {
                let c: u32 = c.trim().parse().with_context(|| format!("bad token count in {entry:?}"))?;
                (p, c)
            }
            None => (entry, 1),
        };
        m.add_tokens(&node_id(place)?, count);
    }
    Ok(m)
}

/// Writes atomically: a temporary file next to `path` is renamed over it.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn save(path: &Path, wf: &WorkflowNet) -> Result<u8> {
    write_atomic(path, &render_for(path, wf))?;
    eprintln!(
        "wrote {} ({} places, {} transitions)",
        path.display(),
        wf.net().places().len(),
        wf.net().transitions().len()
    );
    Ok(0)
}

fn emit(path: Option<&Path>, text: &str) -> Result<u8> {
    match path {
        Some(p) => write_atomic(p, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn exit_code(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Sound => 0,
        Outcome::Unsound => 1,
        Outcome::Unknown => 2,
    }
}

fn print_verdict(v: &SoundnessVerdict) {
    println!("verdict: {}", v.outcome);
    if let Some(w) = &v.witness {
        let trace: Vec<&str> = w.trace.iter().map(|t| t.as_str()).collect();
        println!("witness k: {}", w.k);
        println!("witness k': {}", w.removed);
        println!("witness trace: {}", if trace.is_empty() { "(empty)".into() } else { trace.join(" ") });
        println!("witness reached: {}", w.reached);
        println!("witness stranded: {}", w.stranded);
    }
    println!("states explored: {}", v.states_explored);
}

fn check(args: CheckArgs) -> Result<u8> {
    let wf = load_net(&args.net)?;
    println!(
        "net: {} ({}, {} places, {} transitions)",
        wf.name(),
        wf.border(),
        wf.net().places().len(),
        wf.net().transitions().len()
    );
    if wf.border() == Border::Transition {
        println!("note: checked through its place completion");
    }
    let outcome = if let Some(k) = args.k {
        println!("property: {k}-soundness");
        let v = check_k_sound(&wf, k, args.cap);
        print_verdict(&v);
        v.outcome
    } else if let Some(bound) = args.star {
        println!("property: k-soundness for k = 1..{bound}");
        let report = check_star_sound_bounded(&wf, bound, args.cap);
        for (k, v) in &report.per_k {
            println!("k={k}: {} ({} states)", v.outcome, v.states_explored);
        }
        let aggregate = report.aggregate();
        match report.first_unsound() {
            Some((_, v)) => print_verdict(v),
            None => {
                println!("verdict: {aggregate}");
                println!("states explored: {}", report.states_explored());
            }
        }
        aggregate
    } else {
        let bound = args.sub.unwrap_or(3);
        println!("property: substitution soundness for k = 1..{bound}");
        let v = check_sub_sound_bounded(&wf, bound, args.cap);
        print_verdict(&v);
        v.outcome
    };
    if outcome == Outcome::Sound {
        println!("note: sound up to the bound only");
    }
    Ok(exit_code(outcome))
}

fn classify(wf: &WorkflowNet) {
    let r = classify_base(wf);
    println!("net: {} ({})", wf.name(), r.border);
    println!("AND net: {}", r.and_net);
    println!("OR net: {}", r.or_net);
    println!("one-input: {}", r.one_input);
    println!("one-output: {}", r.one_output);
    for class in BaseClass::ALL {
        let violations = &r.classes[&class];
        if violations.is_empty() {
            println!("{class}: true");
        } else {
            let why: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            println!("{class}: false ({})", why.join("; "));
        }
    }
    println!("free-choice: {}", is_free_choice(wf.net()));
}

fn generate(args: GenerateArgs) -> Result<u8> {
    let (net, tree) = if args.and_or {
        let depth = args.depth.expect("clap requires --depth") as usize;
        let (tree, net) = random_and_or(depth, args.size, args.seed);
        (net, Some(tree))
    } else {
        let class: BaseClass = args.class.as_deref().expect("clap requires --class").parse()?;
        if args.size == 0 {
            bail!("--size must be at least 1");
        }
        (random_base(class, args.size, args.seed), None)
    };
    if let (Some(path), Some(tree)) = (&args.tree, &tree) {
        write_atomic(path, &write_refinement(tree))?;
    }
    match &args.output {
        Some(path) => save(path, &net),
        None => emit(None, &render_for(Path::new("-"), &net)),
    }
}
