use std::io::Write;
use std::path::{Path, PathBuf};

use dtou_core::policy::{extract_app_policy, extract_data_policies, extract_usage_context};
use dtou_core::{default_vocab, Graph, Term};

use crate::{read_graph, Exit, Failure};

struct Found {
    data: usize,
    apps: usize,
    contexts: usize,
}

fn count(g: &Graph, class: &dtou_core::Iri) -> usize {
    g.instances_of(&Term::Iri(class.clone())).count()
}

fn check(path: &Path) -> Result<Found, Failure> {
    let g = read_graph(path)?;
    let v = default_vocab();
    let data = extract_data_policies(&g).map_err(Failure::structural)?.len();
    let apps = count(&g, &v.app_policy_class);
    if apps > 0 {
        extract_app_policy(&g).map_err(Failure::structural)?;
    }
    let contexts = count(&g, &v.usage_context);
    if contexts > 0 {
        extract_usage_context(&g).map_err(Failure::structural)?;
    }
    Ok(Found { data, apps, contexts })
}

/// Checks every file, reporting each one; the exit status is the worst seen.
pub fn run(files: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let mut worst = Exit::Ok;
    for path in files {
        let shown = path.display();
        match check(path) {
            Ok(f) => {
                if f.data + f.apps + f.contexts == 0 {
                    let _ = writeln!(err, "warning: {shown}: no data policy, app policy or usage context");
                }
                let _ = writeln!(
                    out,
                    "{shown}: ok ({} data policies, {} app policies, {} usage contexts)",
                    f.data, f.apps, f.contexts
                );
            }
            Err(e) => {
                let _ = writeln!(err, "{shown}: {e}");
                worst = worst.max(e.exit());
            }
        }
    }
    worst
}
