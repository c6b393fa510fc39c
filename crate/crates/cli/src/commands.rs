use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use atf_core::atf::{
    mutate_diagram_with_certificate, nodal_slide, nodal_trade, rational_blowdown_diagram,
    rational_blowdown_diagram_with, replay_chain, transfer_cut, BaseDiagram,
};
use atf_core::hull::{boundary_hull, distinguish, edge_affine_lengths};
use atf_core::markov::{enumerate, reduce, MarkovTriple};
use atf_core::polytope::{build_polytope, build_polytope_shifted};
use atf_core::render::{render_chain, render_diagram, render_hull, RenderSpec};
use atf_core::verify::verify_all;
use serde::Serialize;

use crate::error::CliError;
use crate::{
    AtfCmd, Canvas, Cli, Command, DiagramSource, Format, HullCmd, MarkovCmd, PolytopeCmd, RawTriple,
    RenderCmd, VerifyCmd,
};

type Result<T> = std::result::Result<T, CliError>;

struct Output<'a> {
    cli: &'a Cli,
}

impl Output<'_> {
    fn write(&self, bytes: &[u8]) -> Result<()> {
        match &self.cli.out {
            Some(path) => fs::write(path, bytes)?,
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut line = serde_json::to_string(value)?;
        line.push('\n');
        self.write(line.as_bytes())
    }

    fn text(&self, body: String) -> Result<()> {
        self.write(body.as_bytes())
    }

    fn note(&self, msg: impl AsRef<str>) {
        if self.cli.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn triple(raw: &RawTriple) -> Result<MarkovTriple> {
    let [a, b, c] = raw.0.clone();
    Ok(MarkovTriple::new(a, b, c)?)
}

/// Constructions work with the sorted triple; say so when it differs.
fn sorted_triple(raw: &RawTriple) -> Result<MarkovTriple> {
    let t = triple(raw)?;
    if !t.is_sorted() {
        eprintln!("note: using sorted triple {} for {}", t.sorted(), t);
    }
    Ok(t.sorted())
}

fn load_diagram(source: &DiagramSource, from_triple: impl Fn(&MarkovTriple) -> Result<BaseDiagram>) -> Result<BaseDiagram> {
    if let Some(raw) = &source.triple {
        return from_triple(&sorted_triple(raw)?);
    }
    let path = source.input.as_ref().expect("clap requires one source");
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))?
    };
    let d: BaseDiagram = serde_json::from_str(&text)?;
    d.validate()?;
    Ok(d)
}

fn blowdown(t: &MarkovTriple) -> Result<BaseDiagram> {
    Ok(rational_blowdown_diagram(t)?)
}

fn toric(t: &MarkovTriple) -> Result<BaseDiagram> {
    Ok(BaseDiagram::toric(&build_polytope(t)?))
}

fn spec(canvas: &Canvas) -> RenderSpec {
    RenderSpec {
        width: canvas.width,
        height: canvas.height,
        labels: !canvas.no_labels,
        ..RenderSpec::default()
    }
}

fn emit_diagram(out: &Output, d: &BaseDiagram) -> Result<()> {
    match out.cli.format {
        Some(Format::Svg) => out.write(&render_diagram(d, &RenderSpec::default())?),
        _ => out.json(d),
    }
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let out = Output { cli };
    let format = cli.format;
    match &cli.command {
        Command::Markov(cmd) => match cmd {
            MarkovCmd::Enumerate(bound) => {
                let ts = enumerate(&bound.max_entry);
                out.note(format!("{} triples", ts.len()));
                let mut body = String::new();
                for t in &ts {
                    match format {
                        Some(Format::Text) => body.push_str(&t.to_string()),
                        _ => body.push_str(&serde_json::to_string(t)?),
                    }
                    body.push('\n');
                }
                out.text(body)?;
            }
            MarkovCmd::Mutate { triple: raw, slot } => {
                let t = triple(&raw.triple)?;
                let m = t.mutate(*slot);
                match format {
                    Some(Format::Text) => out.text(format!("{m}\n"))?,
                    _ => out.json(&m)?,
                }
            }
            MarkovCmd::Reduce(raw) => {
                let t = triple(&raw.triple)?;
                let path = reduce(&t);
                match format {
                    Some(Format::Text) => {
                        let chain: Vec<String> = path.replay().iter().map(|t| t.to_string()).collect();
                        out.text(format!("{}\n", chain.join(" -> ")))?;
                    }
                    _ => out.json(&path)?,
                }
            }
        },
        Command::Polytope(cmd) => match cmd {
            PolytopeCmd::Build { triple: raw, shift } => {
                let t = sorted_triple(&raw.triple)?;
                out.json(&build_polytope_shifted(&t, shift)?)?;
            }
            PolytopeCmd::Verify(raw) => {
                let t = sorted_triple(&raw.triple)?;
                let p = build_polytope(&t)?;
                p.check()?;
                out.json(&serde_json::json!({"triple": t, "ok": true}))?;
            }
        },
        Command::Atf(cmd) => match cmd {
            AtfCmd::Diagram {
                triple: raw,
                cut_fraction,
                toric: plain,
            } => {
                let t = sorted_triple(&raw.triple)?;
                let d = if *plain {
                    toric(&t)?
                } else {
                    rational_blowdown_diagram_with(&t, cut_fraction)?
                };
                emit_diagram(&out, &d)?;
            }
            AtfCmd::Trade {
                source,
                vertex,
                cut_length,
            } => {
                let d = load_diagram(source, toric)?;
                emit_diagram(&out, &nodal_trade(&d, *vertex, cut_length.clone())?)?;
            }
            AtfCmd::Slide {
                source,
                node,
                cut_length,
            } => {
                let d = load_diagram(source, blowdown)?;
                emit_diagram(&out, &nodal_slide(&d, *node, cut_length)?)?;
            }
            AtfCmd::Transfer { source, node, side } => {
                let d = load_diagram(source, blowdown)?;
                emit_diagram(&out, &transfer_cut(&d, *node, *side)?)?;
            }
            AtfCmd::Mutate { triple: raw, slot } => {
                // The slot refers to the triple as given; sorting happens inside.
                let t = triple(&raw.triple)?;
                let m = mutate_diagram_with_certificate(&t, *slot)?;
                match format {
                    Some(Format::Svg) => out.write(&render_diagram(&m.diagram, &RenderSpec::default())?)?,
                    _ => out.json(&m)?,
                }
            }
        },
        Command::Hull(cmd) => match cmd {
            HullCmd::Build(raw) => {
                let t = sorted_triple(&raw.triple)?;
                let h = boundary_hull(&t)?;
                match format {
                    Some(Format::Svg) => out.write(&render_hull(&h, &RenderSpec::default())?)?,
                    _ => out.json(&h)?,
                }
            }
            HullCmd::Lengths(raw) => {
                let t = sorted_triple(&raw.triple)?;
                let ls = edge_affine_lengths(&boundary_hull(&t)?)?;
                let strs: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                match format {
                    Some(Format::Text) => out.text(format!("{}\n", strs.join(" ")))?,
                    _ => out.json(&strs)?,
                }
            }
            HullCmd::Compare { first, second } => {
                let (t1, t2) = (sorted_triple(first)?, sorted_triple(second)?);
                out.json(&distinguish(&t1, &t2)?)?;
            }
        },
        Command::Render(cmd) => match cmd {
            RenderCmd::Diagram { source, canvas } => {
                let d = load_diagram(source, blowdown)?;
                out.write(&render_diagram(&d, &spec(canvas))?)?;
            }
            RenderCmd::Hull { triple: raw, canvas } => {
                let t = sorted_triple(&raw.triple)?;
                out.write(&render_hull(&boundary_hull(&t)?, &spec(canvas))?)?;
            }
            RenderCmd::Chain { triple: raw, canvas } => {
                let t = sorted_triple(&raw.triple)?;
                let steps = replay_chain(&t)?;
                let names: Vec<String> = steps.iter().map(|s| s.triple.to_string()).collect();
                out.note(names.join(" -> "));
                let ds: Vec<BaseDiagram> = steps.into_iter().map(|s| s.diagram).collect();
                out.write(&render_chain(&ds, &spec(canvas))?)?;
            }
        },
        Command::Verify(VerifyCmd::All { bound, workers }) => {
            out.note(format!("verifying with {workers} workers"));
            let report = verify_all(&bound.max_entry, *workers);
            match format {
                Some(Format::Json) => out.json(&report)?,
                _ => out.text(report.to_string())?,
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
