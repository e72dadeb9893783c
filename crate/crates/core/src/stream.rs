//! Text update streams and the run loop behind the command line tool.
//!
//! ```text
//! dtr v1 n=3 mode=dag
//! ins 1 1 2 1 3
//! ins 3 3 2
//! tr
//! red 1 2
//! ```
//!
//! `ins c a b ...` inserts the edges `(a,b) ...` centered at `c`, `del a b ...`
//! deletes, `tr` prints `tr m=<k>` followed by the sorted reduction, and
//! `red a b` prints `red a b 1` when the edge is redundant.

use std::fmt::{self, Write as _};
use std::io;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::engine::{Engine, EngineKind};
use crate::graph::{Edge, Mode, Update, Vertex};
use crate::oracle::{self, StreamConfig};

pub const CSV_HEADER: &str = "step,op,n,m,engine,micros,elementary_ops,tr_size";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamCommand {
    Header { n: usize, mode: Mode },
    Ins { center: Vertex, edges: Vec<Edge> },
    Del { edges: Vec<Edge> },
    Tr,
    Red(Edge),
}

impl StreamCommand {
    pub fn update(&self) -> Option<Update> {
        match self {
            StreamCommand::Ins { center, edges } => {
                Some(Update::InsertCentered { center: *center, edges: edges.clone() })
            }
            StreamCommand::Del { edges } => Some(Update::DeleteSet { edges: edges.clone() }),
            _ => None,
        }
    }
}

impl From<&Update> for StreamCommand {
    fn from(u: &Update) -> Self {
        match u {
            Update::InsertCentered { center, edges } => {
                StreamCommand::Ins { center: *center, edges: edges.clone() }
            }
            Update::DeleteSet { edges } => StreamCommand::Del { edges: edges.clone() },
        }
    }
}

fn write_edges(f: &mut fmt::Formatter<'_>, edges: &[Edge]) -> fmt::Result {
    for e in edges {
        write!(f, " {} {}", e.tail, e.head)?;
    }
    Ok(())
}

impl fmt::Display for StreamCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamCommand::Header { n, mode } => write!(f, "dtr v1 n={n} mode={mode}"),
            StreamCommand::Ins { center, edges } => {
                write!(f, "ins {center}")?;
                write_edges(f, edges)
            }
            StreamCommand::Del { edges } => {
                f.write_str("del")?;
                write_edges(f, edges)
            }
            StreamCommand::Tr => f.write_str("tr"),
            StreamCommand::Red(e) => write!(f, "red {} {}", e.tail, e.head),
        }
    }
}

fn number<T: FromStr>(tok: &str) -> Result<T, String> {
    // Reject signs and leading junk that `parse` would accept.
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a number, found `{tok}`"));
    }
    tok.parse().map_err(|_| format!("number out of range: `{tok}`"))
}

fn edge_list(toks: &[&str]) -> Result<Vec<Edge>, String> {
    if toks.is_empty() || toks.len() % 2 != 0 {
        return Err("expected a nonempty list of vertex pairs".into());
    }
    toks.chunks(2)
        .map(|p| Ok(Edge::new(number(p[0])?, number(p[1])?)))
        .collect()
}

impl FromStr for StreamCommand {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        if line.contains("  ") || line.starts_with(' ') || line.ends_with(' ') {
            return Err("tokens must be separated by single spaces".into());
        }
        let toks: Vec<&str> = line.split(' ').collect();
        match toks[0] {
            "dtr" => {
                let [_, "v1", n, mode] = toks[..] else {
                    return Err("expected `dtr v1 n=<n> mode=<dag|general>`".into());
                };
                let n = n.strip_prefix("n=").ok_or("expected `n=<n>`")?;
                let mode = mode.strip_prefix("mode=").ok_or("expected `mode=<dag|general>`")?;
                Ok(StreamCommand::Header { n: number(n)?, mode: mode.parse()? })
            }
            "ins" => {
                let center = number(toks.get(1).ok_or("missing center")?)?;
                Ok(StreamCommand::Ins { center, edges: edge_list(&toks[2..])? })
            }
            "del" => Ok(StreamCommand::Del { edges: edge_list(&toks[1..])? }),
            "tr" if toks.len() == 1 => Ok(StreamCommand::Tr),
            "red" => match edge_list(&toks[1..])?[..] {
                [e] => Ok(StreamCommand::Red(e)),
                _ => Err("`red` takes exactly one edge".into()),
            },
            other => Err(format!("unknown command `{other}`")),
        }
    }
}

/// A parsed stream: header values and the remaining commands with their
/// 1-based line numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub n: usize,
    pub mode: Mode,
    pub commands: Vec<(usize, StreamCommand)>,
}

impl Stream {
    pub fn from_updates(n: usize, mode: Mode, updates: &[Update]) -> Stream {
        let commands = updates
            .iter()
            .enumerate()
            .map(|(i, u)| (i + 2, StreamCommand::from(u)))
            .collect();
        Stream { n, mode, commands }
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", StreamCommand::Header { n: self.n, mode: self.mode })?;
        for (_, c) in &self.commands {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: `{command}`: {source}")]
    Engine {
        line: usize,
        command: String,
        source: crate::Error,
    },
    #[error("line {line}: check failed: {detail}")]
    Check {
        line: usize,
        detail: String,
        /// The stream up to and including the failing line.
        reproducer: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse { .. } => 1,
            RunError::Engine { .. } | RunError::Io(_) => 2,
            RunError::Check { .. } => 3,
        }
    }
}

/// Strict parse: a header first, then one command per line. Blank lines are
/// errors too, except for a single trailing newline.
pub fn parse_stream(text: &str) -> Result<Stream, RunError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    let parse = |line: usize, s: &str| {
        s.parse::<StreamCommand>()
            .map_err(|msg| RunError::Parse { line, msg })
    };
    let (_, first) = lines.next().unwrap_or((1, ""));
    let StreamCommand::Header { n, mode } = parse(1, first)? else {
        return Err(RunError::Parse { line: 1, msg: "stream must start with a header".into() });
    };
    let mut commands = Vec::new();
    for (line, s) in lines {
        match parse(line, s)? {
            StreamCommand::Header { .. } => {
                return Err(RunError::Parse { line, msg: "duplicate header".into() });
            }
            c => {
                let edges: &[Edge] = match &c {
                    StreamCommand::Ins { edges, .. } | StreamCommand::Del { edges } => edges,
                    StreamCommand::Red(e) => std::slice::from_ref(e),
                    _ => &[],
                };
                let mut vs: Vec<Vertex> = edges.iter().flat_map(|e| [e.tail, e.head]).collect();
                if let StreamCommand::Ins { center, .. } = c {
                    vs.push(center);
                }
                if let Some(v) = vs.into_iter().find(|&v| v == 0 || v as usize > n) {
                    return Err(RunError::Parse { line, msg: format!("vertex {v} outside 1..={n}") });
                }
                commands.push((line, c));
            }
        }
    }
    Ok(Stream { n, mode, commands })
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub engine: EngineKind,
    pub check: bool,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { engine: EngineKind::Comb, check: false, seed: 0 }
    }
}

/// One CSV row per update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatRow {
    pub step: usize,
    pub op: &'static str,
    pub n: usize,
    pub m: usize,
    pub engine: String,
    pub micros: u128,
    pub elementary_ops: u64,
    pub tr_size: usize,
}

impl fmt::Display for StatRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{}",
            self.step, self.op, self.n, self.m, self.engine, self.micros, self.elementary_ops, self.tr_size
        )
    }
}

pub fn write_csv<W: io::Write>(mut w: W, rows: &[StatRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub output: String,
    pub stats: Vec<StatRow>,
}

/// Compares the engine against the oracle; `Some(reason)` on mismatch.
pub fn check_engine(engine: &dyn Engine) -> Option<String> {
    let g = engine.graph();
    let tr = engine.tr_edges();
    match g.mode() {
        Mode::Dag => {
            let want = oracle::brute_tr_dag(g).expect("acyclic");
            (tr != want).then(|| format!("reduction {tr:?} differs from {want:?}"))
        }
        Mode::General => {
            if let Some(v) = oracle::validity_violation(g.n(), &g.edges(), &tr) {
                return Some(v);
            }
            let comp = oracle::closure_sccs(g.n(), &g.edges());
            oracle::parallel_groups(&comp, &g.edges()).into_iter().find_map(|grp| {
                let kept = grp.iter().filter(|e| tr.binary_search(e).is_ok()).count();
                (kept > 1).then(|| format!("{kept} edges kept from one parallel group"))
            })
        }
    }
}

pub fn run_stream(text: &str, opts: &RunOptions) -> Result<RunOutput, RunError> {
    let stream = parse_stream(text)?;
    let mut engine = opts.engine.build(stream.n, stream.mode, opts.seed);
    let mut out = RunOutput::default();
    let mut step = 0;
    for (line, cmd) in &stream.commands {
        let line = *line;
        let engine_err = |source| RunError::Engine { line, command: cmd.to_string(), source };
        match cmd {
            StreamCommand::Tr => {
                let tr = engine.tr_edges();
                writeln!(out.output, "tr m={}", tr.len()).unwrap();
                for e in tr {
                    writeln!(out.output, "{} {}", e.tail, e.head).unwrap();
                }
            }
            StreamCommand::Red(e) => {
                let r = engine.is_redundant(*e).map_err(engine_err)?;
                writeln!(out.output, "red {} {} {}", e.tail, e.head, r as u8).unwrap();
            }
            StreamCommand::Header { .. } => unreachable!("rejected by the parser"),
            StreamCommand::Ins { .. } | StreamCommand::Del { .. } => {
                let update = cmd.update().expect("update command");
                let ops_before = engine.elementary_ops();
                let start = Instant::now();
                engine.apply(&update).map_err(engine_err)?;
                let micros = start.elapsed().as_micros();
                step += 1;
                out.stats.push(StatRow {
                    step,
                    op: if matches!(cmd, StreamCommand::Ins { .. }) { "ins" } else { "del" },
                    n: stream.n,
                    m: engine.graph().m(),
                    engine: opts.engine.to_string(),
                    micros,
                    elementary_ops: engine.elementary_ops() - ops_before,
                    tr_size: engine.tr_edges().len(),
                });
                if opts.check {
                    if let Some(detail) = check_engine(engine.as_ref()) {
                        let reproducer = text
                            .split_inclusive('\n')
                            .take(line)
                            .collect::<String>();
                        return Err(RunError::Check { line, detail, reproducer });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs a generated stream and returns one row per update.
pub fn bench(cfg: &StreamConfig, kind: EngineKind) -> Result<Vec<StatRow>, RunError> {
    let updates = oracle::random_update_stream(cfg);
    let text = Stream::from_updates(cfg.n, cfg.mode, &updates).to_string();
    let opts = RunOptions { engine: kind, check: false, seed: cfg.seed };
    Ok(run_stream(&text, &opts)?.stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    const D3: &str = "dtr v1 n=3 mode=dag\nins 1 1 2 1 3\nins 3 3 2\ntr\nred 1 2\n";

    #[test]
    fn d3_stream() {
        for engine in EngineKind::ALL {
            let opts = RunOptions { engine, check: true, seed: 1 };
            let out = run_stream(D3, &opts).unwrap();
            assert_eq!(out.output, "tr m=2\n1 3\n3 2\nred 1 2 1\n");
            assert_eq!(out.stats.len(), 2);
        }
    }

    #[test]
    fn empty_stream() {
        let out = run_stream("dtr v1 n=4 mode=general\ntr\n", &RunOptions::default()).unwrap();
        assert_eq!(out.output, "tr m=0\n");
    }

    #[test]
    fn parse_errors_carry_lines() {
        for (text, line) in [
            ("", 1),
            ("ins 1 1 2\n", 1),
            ("dtr v1 n=3 mode=tree\n", 1),
            ("dtr v1 n=3 mode=dag\nins 1 1 2\nfoo\n", 3),
            ("dtr v1 n=3 mode=dag\nins 1  1 2\n", 2),
            ("dtr v1 n=3 mode=dag\ndel 1\n", 2),
            ("dtr v1 n=3 mode=dag\nred 1 4\n", 2),
            ("dtr v1 n=3 mode=dag\ntr\n\n", 3),
            ("dtr v1 n=3 mode=dag\ndtr v1 n=3 mode=dag\n", 2),
            ("dtr v1 n=3 mode=dag\nins -1 1 2\n", 2),
        ] {
            match parse_stream(text) {
                Err(RunError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn engine_errors_name_the_command() {
        let err = run_stream("dtr v1 n=3 mode=dag\nins 1 1 2\nins 2 2 1\n", &RunOptions::default())
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert_eq!(err.to_string(), "line 3: `ins 2 2 1`: insertion centered at 2 would create a cycle");
    }

    #[test]
    fn round_trip() {
        let s = parse_stream(D3).unwrap();
        assert_eq!(s.to_string(), D3);
        assert_eq!(parse_stream(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "step,op,n,m,engine,micros,elementary_ops,tr_size\n");
    }
}
