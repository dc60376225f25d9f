use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

/// Build, transform and verify generalized workflow nets.
///
/// Net files use the text format unless their extension is `.pnml`.
#[derive(Debug, Parser)]
#[command(name = "wfsub", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check k-, *- or substitution soundness up to a bound.
    ///
    /// Exit status: 0 sound, 1 unsound, 2 unknown (state cap reached), 3 error.
    Check(CheckArgs),
    /// Replace a node of OUTER by the net INNER (inner nodes are prefixed "NODE/").
    Substitute {
        outer: PathBuf,
        node: String,
        inner: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Add a global input/output place (--place) or transition (--transition).
    #[command(group(ArgGroup::new("which").required(true).args(["place", "transition"])))]
    Complete {
        net: PathBuf,
        #[arg(long)]
        place: bool,
        #[arg(long)]
        transition: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Remove a transition-place (--tp T,P) or place-transition (--pt P,T) pair.
    #[command(group(ArgGroup::new("pair").required(true).args(["tp", "pt", "list"])))]
    Reduce {
        net: PathBuf,
        #[arg(long, value_name = "T,P")]
        tp: Option<String>,
        #[arg(long, value_name = "P,T")]
        pt: Option<String>,
        /// List the removable pairs instead of removing one.
        #[arg(long)]
        list: bool,
        #[arg(short, long, required_unless_present = "list")]
        output: Option<PathBuf>,
    },
    /// Report membership in pAND, 11tAND, 11pOR, tOR and free choice.
    Classify { net: PathBuf },
    /// Expand a refinement script into a flat net.
    Expand {
        script: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Allow base nets outside the four generator classes.
        #[arg(long)]
        unchecked: bool,
    },
    /// Generate a random base-class net or AND-OR net.
    Generate(GenerateArgs),
    /// Write a net as Graphviz DOT or PNML.
    #[command(group(ArgGroup::new("format").required(true).args(["dot", "pnml"])))]
    Export {
        net: PathBuf,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        pnml: bool,
        /// Token counts to draw, e.g. `p:2,q:1` (DOT only).
        #[arg(long, value_name = "P:N,...", requires = "dot")]
        marking: Option<String>,
        /// Write to a file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").args(["k", "star", "sub"])))]
pub struct CheckArgs {
    pub net: PathBuf,
    /// k-soundness for exactly this k.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub k: Option<u32>,
    /// k-soundness for every k up to K.
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u32).range(1..))]
    pub star: Option<u32>,
    /// Substitution soundness for every k up to K (the default, with K = 3).
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u32).range(1..))]
    pub sub: Option<u32>,
    /// Maximum number of states per exploration.
    #[arg(long, value_name = "S", default_value_t = wfsub::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["class", "and_or"])))]
pub struct GenerateArgs {
    /// One of pAND, 11tAND, 11pOR, tOR.
    #[arg(long)]
    pub class: Option<String>,
    /// Generate a refinement tree of base nets and expand it.
    #[arg(long, requires = "depth")]
    pub and_or: bool,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub depth: Option<u32>,
    /// Target node count (per base net for --and-or).
    #[arg(long, default_value_t = 6)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the net to a file instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// With --and-or, also write the refinement tree as a script.
    #[arg(long, requires = "and_or")]
    pub tree: Option<PathBuf>,
}
