use std::io::Write;

use dtou_core::policy::{add_data_policy, policy_to_graph};
use dtou_core::reasoner::{check_conformance, check_obligations, derive_policies, derive_policy, DerivedPolicy};
use dtou_core::report::{ConformanceReport, ObligationReport, SCHEMA_VERSION};
use dtou_core::{default_vocab, serialize_turtle, Graph, Iri, KnowledgeBase};
use serde_json::json;

use crate::{data_files, read_graph, CheckArgs, Exit, Failure, Format, TaskArg};

pub fn knowledge_base(args: &CheckArgs) -> Result<KnowledgeBase, Failure> {
    let context = read_graph(&args.context)?;
    let app = read_graph(&args.app)?;
    let data = data_files(&args.data)?.iter().map(|p| read_graph(p)).collect::<Result<Vec<_>, _>>()?;
    let kb = KnowledgeBase::assemble(&context, &app, &data).map_err(Failure::structural)?;
    Ok(match &args.vocabulary {
        Some(path) => kb.with_vocabulary(&read_graph(path)?),
        None => kb,
    })
}

/// Data uri given to a derived policy when no `--target` is set.
pub fn default_target(port: &str) -> String {
    let mut uri = String::from("urn:dtou:output:");
    for b in port.bytes() {
        if b.is_ascii_alphanumeric() || b"-._~".contains(&b) {
            uri.push(b as char);
        } else {
            uri.push_str(&format!("%{b:02X}"));
        }
    }
    uri
}

fn json_line(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

pub fn run(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Exit, Failure> {
    let format = args.format.unwrap_or(if args.task == TaskArg::Derive { Format::Turtle } else { Format::Json });
    if format == Format::Turtle && args.task != TaskArg::Derive {
        return Err(Failure::Structural("turtle output is only available with --task derive".into()));
    }
    let vocab = default_vocab();
    let opts = args.reasoner.options();
    let kb = knowledge_base(args)?;
    for w in &kb.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let denied_uncovered = args.strict && !kb.uncovered_inputs.is_empty();
    match args.task {
        TaskArg::Conformance => {
            let report = ConformanceReport::new(&kb, &check_conformance(&kb, &opts), args.strict, vocab);
            json_line(out, &report)?;
            Ok(if report.permitted { Exit::Ok } else { Exit::Conflicts })
        }
        TaskArg::Obligations => {
            json_line(out, &ObligationReport::new(&kb, &check_obligations(&kb, &opts), vocab))?;
            Ok(if denied_uncovered { Exit::Conflicts } else { Exit::Ok })
        }
        TaskArg::Derive => {
            let derived = match &args.output_port {
                Some(port) => derive_policy(&kb, port, &opts).map(|d| vec![d]),
                None => derive_policies(&kb, &opts),
            }
            .map_err(Failure::structural)?;
            let target = |d: &DerivedPolicy| args.target.clone().unwrap_or_else(|| default_target(&d.output_port));
            match format {
                Format::Turtle => {
                    let mut g = Graph::new();
                    for d in &derived {
                        add_data_policy(&mut g, &d.to_data_policy(Iri::new(target(d))), vocab);
                    }
                    write!(out, "{}", serialize_turtle(&g, &vocab.prefixes()))?;
                }
                Format::Json => {
                    let items: Vec<_> = derived
                        .iter()
                        .map(|d| {
                            let uri = target(d);
                            let doc = serialize_turtle(&policy_to_graph(&d.to_data_policy(Iri::new(&uri))), &vocab.prefixes());
                            json!({ "output_port": d.output_port, "uri": uri, "policy": doc })
                        })
                        .collect();
                    json_line(out, &json!({ "schema_version": SCHEMA_VERSION, "derived": items }))?;
                }
            }
            Ok(Exit::Ok)
        }
    }
}
