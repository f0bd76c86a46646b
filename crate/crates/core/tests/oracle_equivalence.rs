use dtou_core::reasoner::{
    check_conformance, check_obligations, derive_policies, EvalOrder, Parallelism, ReasonerOptions,
};
use dtou_core::{parse_turtle, Graph, KnowledgeBase, Vocab};
use dtou_testkit::{random_kb, summary, Oracle, RandomKb};

struct Parsed {
    context: Graph,
    app: Graph,
    data: Vec<Graph>,
    vocabulary: Graph,
}

fn parse(kb: &RandomKb) -> Parsed {
    let p = |t: &str| parse_turtle(t, None).unwrap_or_else(|e| panic!("{e}\n{t}"));
    Parsed {
        context: p(&kb.context),
        app: p(&kb.app),
        data: kb.data.iter().map(|d| p(d)).collect(),
        vocabulary: p(&kb.vocabulary),
    }
}

#[derive(Default, Debug)]
struct Coverage {
    conflicts: [usize; 3],
    obligations: usize,
    derived_terms: usize,
    derivation_errors: usize,
}

fn check_seed(seed: u64, cov: &mut Coverage) {
    let kb_text = random_kb(seed);
    let g = parse(&kb_text);
    let kb = KnowledgeBase::assemble(&g.context, &g.app, &g.data)
        .unwrap_or_else(|e| panic!("seed {seed}: {e}"))
        .with_vocabulary(&g.vocabulary);
    let vocab = Vocab::default();
    let graphs: Vec<&Graph> = [&g.context, &g.app, &g.vocabulary].into_iter().chain(&g.data).collect();

    for rdfs_closure in [false, true] {
        let oracle = Oracle::new(graphs.iter().copied()).with_rdfs_closure(rdfs_closure);
        let expected_conflicts = oracle.conformance();
        let expected_obligations = oracle.obligations();
        let expected_derived = oracle.derivation();
        if !rdfs_closure {
            for c in &expected_conflicts {
                let i = ["UnsatisfiedRequirement", "UnmatchedExpectation", "ProhibitedUse"].iter().position(|k| *k == c.kind).unwrap();
                cov.conflicts[i] += 1;
            }
            cov.obligations += expected_obligations.len();
            match &expected_derived {
                Ok(d) => cov.derived_terms += d.values().map(|s| s.term_count()).sum::<usize>(),
                Err(_) => cov.derivation_errors += 1,
            }
        }
        for order in [EvalOrder::Forward, EvalOrder::Reversed] {
            for parallelism in [Parallelism::Sequential, Parallelism::Parallel] {
                let opts = ReasonerOptions { rdfs_closure, order, parallelism };
                let ctx = format!("seed {seed} {opts:?}");
                let conflicts = summary::conflicts(&check_conformance(&kb, &opts), &vocab);
                assert_eq!(conflicts, expected_conflicts, "{ctx}: conformance\n{kb_text:#?}");
                let obligations = summary::obligations(&check_obligations(&kb, &opts));
                assert_eq!(obligations, expected_obligations, "{ctx}: obligations");
                match (derive_policies(&kb, &opts), &expected_derived) {
                    (Ok(found), Ok(expected)) => {
                        assert_eq!(&summary::derived(&found, &vocab), expected, "{ctx}: derivation\n{kb_text:#?}")
                    }
                    (Err(_), Err(_)) => {}
                    (found, expected) => panic!("{ctx}: derivation {found:?} vs oracle {expected:?}"),
                }
            }
        }
    }
}

#[test]
fn engine_matches_oracle_on_100_random_knowledge_bases() {
    let mut cov = Coverage::default();
    for seed in 0..100 {
        check_seed(seed, &mut cov);
    }
    println!("{cov:?}");
    // the generator must exercise every rule, or equality proves little
    assert!(cov.conflicts.iter().all(|&n| n > 50), "{cov:?}");
    assert!(cov.obligations > 50 && cov.derived_terms > 500, "{cov:?}");
    assert!(cov.derivation_errors > 0 && cov.derivation_errors < 50, "{cov:?}");
}
