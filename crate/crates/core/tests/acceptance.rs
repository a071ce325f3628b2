//! Acceptance checks, one line per criterion. Runs with its own harness so
//! the output reads as a checklist; any failure makes the binary exit 1.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use verblex::corpus::Corpus;
use verblex::defparser::{parse_definition, Indicator, LexIndex, ParseContext};
use verblex::eval::{ablate_roles, ablate_templates, load_cases, prf, spearman, TRANSITIVE_TEMPLATE};
use verblex::inference::{closure, entails, Entailment, Event, GroundFact, Time};
use verblex::learner::{
    bootstrap, derive_templates, generate_axiom, identify_roles, BootstrapOptions, BuildReport, InducedConstraints,
    Learner, Reason, RuleSet, Status,
};
use verblex::logic::AxiomId;
use verblex::mapping::{Hybrid, HybridNode};
use verblex::model::{Preference, Resource, SemRole, TypeId};

// Pinned tolerances and budgets.
const KILL_BUDGET: Duration = Duration::from_secs(1);
const WUP_BUDGET: Duration = Duration::from_secs(5);
const WUP_PAIRS: usize = 10_000;
const WUP_MIN_NODES: usize = 200;
const SPOT_TOL: f64 = 1e-4;
const RHO_TOL: f64 = 1e-9;
const ORACLE_TRIALS: usize = 100;
const CHAIN_MAX_DEPTH: usize = 3;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ty(name: &str) -> TypeId {
    common::ty(name)
}

fn role(name: &str) -> SemRole {
    SemRole::new(name).unwrap()
}

struct Fixture {
    seed: Resource,
    rules: RuleSet,
    corpus: Corpus,
    built: Resource,
    report: BuildReport,
}

impl Fixture {
    fn load() -> Fixture {
        let seed = common::seed();
        let rules = common::rules(&seed);
        let corpus = common::corpus();
        let (built, report) = bootstrap(&corpus, seed.clone(), &rules, BootstrapOptions::default()).unwrap();
        Fixture {
            seed,
            rules,
            corpus,
            built,
            report,
        }
    }

    fn learned_type(&self, synset: &str) -> Result<TypeId, String> {
        self.report
            .status_of(synset)
            .and_then(|s| s.new_type.clone())
            .ok_or_else(|| format!("{synset} produced no type"))
    }

    fn parent_of(&self, synset: &str) -> Result<TypeId, String> {
        let t = self.learned_type(synset)?;
        self.built
            .get(&t)
            .map_err(|e| e.to_string())?
            .parent
            .clone()
            .ok_or_else(|| format!("{t} has no parent"))
    }
}

fn c1_kill_pipeline(f: &Fixture) -> Check {
    let start = Instant::now();
    let def = f.corpus.get("kill%2:35:00::").unwrap().definitions().remove(0);
    let graphs = parse_definition(&LexIndex::new(&f.seed), &def, &ParseContext::default()).map_err(|e| e.to_string())?;
    let g = &graphs[0];
    let root = g.root_node();
    ensure!(root.ty == ty("ONT::CAUSE-EFFECT"), "root is {}", root.ty);
    ensure!(g.impros().count() == 2, "{} IMPROs", g.impros().count());
    ensure!(
        g.nodes.iter().any(|n| n.ty == ty("ONT::DIE") && n.indicator == Indicator::F),
        "no DIE event in {}",
        g.term_dump()
    );
    let a = identify_roles(&f.seed, &f.rules.skeleton, g).map_err(|e| format!("{e:?}"))?;
    ensure!(a.roles() == [role("AGENT"), role("AFFECTED")], "roles {:?}", a.roles());
    let ax = generate_axiom(g, &a, &ty("ONT::KILL-WN23500")).map_err(|e| e.to_string())?;
    let hand = &f.seed.axioms[&AxiomId("kill".into())];
    ensure!(ax.consequent == hand.consequent, "consequent {} vs {}", ax.consequent, hand.consequent);
    ensure!(ax.antecedent.vars == hand.antecedent.vars, "antecedent {} vs {}", ax.antecedent, hand.antecedent);
    ensure!(ax.existentials.is_empty(), "existentials {:?}", ax.existentials);
    let took = start.elapsed();
    ensure!(took < KILL_BUDGET, "took {took:?}");
    Ok(())
}

fn c2_chaining(f: &Fixture) -> Check {
    let kill = Event::new(ty("ONT::KILL")).with("AGENT", "x").unwrap().with("AFFECTED", "y").unwrap();
    let fact = GroundFact::new(kill, Time::at("t"));
    let axioms: Vec<_> = ["kill", "cause-effect", "die"]
        .iter()
        .map(|id| &f.seed.axioms[&AxiomId(id.to_string())])
        .collect();
    let c = closure(&f.seed, &[fact], &axioms, 8).map_err(|e| e.to_string())?;
    let dead = Event::new(ty("ONT::DEAD")).with("FIGURE", "y").unwrap();
    let not_now = GroundFact {
        event: dead.clone(),
        negated: true,
        time: Time::at("t"),
    };
    let after = GroundFact::new(dead, Time::after("t"));
    for q in [&not_now, &after] {
        let i = c.facts.iter().position(|x| &x.fact == q).ok_or(format!("{q} not derived"))?;
        ensure!(c.facts[i].depth <= CHAIN_MAX_DEPTH, "{q} at depth {}", c.facts[i].depth);
        let trace = c.trace(i);
        let axioms: Vec<String> = trace.iter().filter_map(|s| s.axiom.as_ref().map(|a| a.0.clone())).collect();
        ensure!(axioms == ["kill", "cause-effect", "die"], "trace {axioms:?}");
        ensure!(
            matches!(entails(&f.seed, &c, q, true).map_err(|e| e.to_string())?, Entailment::Yes(_)),
            "entails says unknown for {q}"
        );
    }
    Ok(())
}

fn c3_skeleton_rows(f: &Fixture) -> Check {
    // (synset, phi's LF node, expected role, rule)
    let rows = [
        ("censure%2:32:00::", "X1", "AGENT", "direct-core"),
        ("agitate%2:37:00::", "X3", "AFFECTED", "embedded-core"),
        ("weaken%2:30:00::", "X4", "AFFECTED", "figure-of-core"),
        ("approach%2:38:00::", "X4", "NEUTRAL", "ground-of-result"),
        ("outweigh%2:42:00::", "X4", "NEUTRAL1", "compar-of-formal"),
    ];
    let learner = Learner::new(&f.seed, &f.corpus, &f.rules);
    for (synset, phi, want, rule) in rows {
        let out = learner.process(f.corpus.get(synset).unwrap()).map_err(|e| e.to_string())?;
        let cand = out.accepted().ok_or(format!("{synset}: {:?}", out.status()))?;
        let g = &cand.graph;
        for gap in g.impros() {
            let n = cand.assignment.bindings.iter().filter(|b| b.nodes.contains(&gap.id)).count();
            ensure!(n == 1, "{synset}: gap {} bound {n} times", gap.id);
        }
        let b = cand
            .assignment
            .bindings
            .iter()
            .find(|b| b.nodes.iter().any(|n| n == phi))
            .ok_or(format!("{synset}: {phi} unbound in {}", g.term_dump()))?;
        ensure!(b.target_role == role(want), "{synset}: {phi} -> {}", b.target_role);
        ensure!(b.rule_id == rule, "{synset}: rule {}", b.rule_id);
    }
    Ok(())
}

fn c4_classification(f: &Fixture) -> Check {
    ensure!(f.parent_of("breakfast%2:34:00::")? == ty("ONT::EAT"), "breakfast under {}", f.parent_of("breakfast%2:34:00::")?);
    ensure!(
        f.parent_of("breeze%2:38:00::")? == ty("ONT::MOVE-RAPIDLY"),
        "breeze under {}",
        f.parent_of("breeze%2:38:00::")?
    );
    let drinks: BTreeSet<TypeId> = ["port%2:34:00::", "claret%2:34:00::", "wine%2:34:00::"]
        .iter()
        .map(|s| f.learned_type(s))
        .collect::<Result<_, _>>()?;
    ensure!(drinks.len() == 1, "drink synsets spread over {drinks:?}");
    let t = drinks.first().unwrap();
    let merged = f.built.get(t).map_err(|e| e.to_string())?;
    ensure!(merged.parent == Some(ty("ONT::DRINKING")), "{t} under {:?}", merged.parent);
    let affected = f
        .built
        .role_spec(t, &role("AFFECTED"))
        .map_err(|e| e.to_string())?
        .ok_or("no AFFECTED role")?;
    ensure!(
        affected.preference == Preference::Type(ty("ONT::ALCOHOL")),
        "AFFECTED prefers {:?}",
        affected.preference
    );
    Ok(())
}

fn c5_templates(f: &Fixture) -> Check {
    let subj = "AGENT-FORMAL-SUBJCONTROL-TEMPL".to_string();
    let incite = InducedConstraints::new(&f.seed, &ty("ONT::CAUSE-EFFECT")).map_err(|e| e.to_string())?;
    ensure!(incite.candidate_templates.contains(&subj), "pool lacks {subj}");
    let roles = [role("AGENT"), role("AFFECTED")];
    let kept = derive_templates(&f.seed, &roles, &incite).map_err(|e| e.to_string())?;
    ensure!(!kept.contains(&subj), "filter kept {subj}: {kept:?}");
    let mut empty = incite.clone();
    empty.candidate_templates.clear();
    let backoff = derive_templates(&f.seed, &roles, &empty).map_err(|e| e.to_string())?;
    ensure!(backoff == [TRANSITIVE_TEMPLATE], "backoff gave {backoff:?}");
    let pinion = ty("ONT::PINION-WN23500");
    ensure!(f.learned_type("pinion%2:35:00::")? == pinion, "pinion named {}", f.learned_type("pinion%2:35:00::")?);
    for word in ["pinion", "shackle"] {
        let ok = f
            .built
            .entries_for(word)
            .flat_map(|e| &e.senses)
            .any(|s| s.ty == pinion && s.templates == [TRANSITIVE_TEMPLATE]);
        ensure!(ok, "{word} lacks a transitive sense of {pinion}");
    }
    Ok(())
}

fn c6_consistency(f: &Fixture) -> Check {
    let ask = f.report.status_of("ask%2:32:05::").ok_or("ask not processed")?;
    ensure!(
        ask.status == Status::Rejected(Reason::StativeVsEvent),
        "ask status {:?}",
        ask.status
    );
    let rejected = f.report.synsets.iter().filter(|s| !s.status.is_accepted()).count();
    ensure!(f.report.rejected_total() == rejected, "{} counted vs {rejected} listed", f.report.rejected_total());
    let mut by_reason: BTreeMap<Reason, usize> = BTreeMap::new();
    for s in &f.report.synsets {
        if let Some(r) = s.status.reason() {
            *by_reason.entry(r).or_default() += 1;
        }
    }
    ensure!(by_reason == f.report.rejected, "per-reason counts {by_reason:?} vs {:?}", f.report.rejected);
    Ok(())
}

fn c7_wup() -> Check {
    let start = Instant::now();
    let (r, c) = common::random_hierarchy(7, 120, 180);
    let h = Hybrid::new(&r, &c);
    let mut nodes: Vec<HybridNode> = r.ontology.keys().cloned().map(HybridNode::Type).collect();
    let mut mapped = Vec::new();
    for s in c.iter() {
        if let Some(m) = h.resolve_mapping(&s.id).map_err(|e| e.to_string())? {
            nodes.push(HybridNode::Synset(s.id.clone()));
            mapped.push((s.id.clone(), m.ty));
        }
    }
    ensure!(nodes.len() >= WUP_MIN_NODES, "only {} nodes", nodes.len());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..WUP_PAIRS {
        let a = nodes.choose(&mut rng).unwrap();
        let b = nodes.choose(&mut rng).unwrap();
        let ab = h.wup(a, b).map_err(|e| e.to_string())?;
        ensure!(ab == h.wup(b, a).unwrap(), "asymmetric at {a} {b}");
        ensure!(ab > 0.0 && ab <= 1.0, "wup({a}, {b}) = {ab}");
        ensure!(h.wup(a, a).unwrap() == 1.0, "wup({a}, {a}) != 1");
    }
    for (s, t) in &mapped {
        let ds = h.hybrid_depth(&HybridNode::Synset(s.clone())).unwrap();
        let dt = h.hybrid_depth(&HybridNode::Type(t.clone())).unwrap();
        ensure!(ds > dt, "{s} at depth {ds}, its type {t} at {dt}");
    }
    // R (depth 1) > A (depth 2) > {B, C} (depth 3).
    let tree = [("ONT::R", None), ("ONT::A", Some("ONT::R")), ("ONT::B", Some("ONT::A")), ("ONT::C", Some("ONT::A"))];
    let tree: Vec<(String, Option<String>)> =
        tree.iter().map(|(a, b)| (a.to_string(), b.map(str::to_string))).collect();
    let small = common::tree_resource(&tree, Vec::new());
    let empty = Corpus::default();
    let h = Hybrid::new(&small, &empty);
    let n = |s: &str| HybridNode::Type(ty(s));
    let bc = h.wup(&n("ONT::B"), &n("ONT::C")).unwrap();
    let ab = h.wup(&n("ONT::A"), &n("ONT::B")).unwrap();
    ensure!((bc - 0.6667).abs() < SPOT_TOL, "wup(B, C) = {bc}");
    ensure!((ab - 0.8).abs() < SPOT_TOL, "wup(A, B) = {ab}");
    let took = start.elapsed();
    ensure!(took < WUP_BUDGET, "took {took:?}");
    Ok(())
}

/// Brute-force Spearman: counted average ranks, then the textbook Pearson sum.
fn brute_rho(xs: &[f64], ys: &[f64]) -> f64 {
    let ranks = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|x| {
                let below = v.iter().filter(|y| *y < x).count() as f64;
                let tied = v.iter().filter(|y| *y == x).count() as f64;
                below + (tied + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (ranks(xs), ranks(ys));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&rx), mean(&ry));
    let num: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den = (rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>() * ry.iter().map(|b| (b - my).powi(2)).sum::<f64>()).sqrt();
    num / den
}

fn c8_metric_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..ORACLE_TRIALS {
        // Small integer range so ties are common.
        let xs: Vec<f64> = (0..10).map(|_| rng.gen_range(0..7) as f64).collect();
        let ys: Vec<f64> = (0..10).map(|_| rng.gen_range(0..7) as f64).collect();
        let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
        match spearman(&xs, &ys) {
            Ok(rho) => {
                let want = brute_rho(&xs, &ys);
                ensure!((rho - want).abs() < RHO_TOL, "trial {trial}: {rho} vs {want}");
            }
            Err(_) => ensure!(constant(&xs) || constant(&ys), "trial {trial}: spurious error"),
        }
    }
    let universe = 0u8..12;
    for trial in 0..ORACLE_TRIALS {
        let p: BTreeSet<u8> = universe.clone().filter(|_| rng.gen_bool(0.4)).collect();
        let mut g: BTreeSet<u8> = universe.clone().filter(|_| rng.gen_bool(0.4)).collect();
        if g.is_empty() {
            g.insert(universe.clone().choose(&mut rng).unwrap());
        }
        let hit = p.iter().filter(|x| g.contains(x)).count() as f64;
        let precision = if p.is_empty() { 0.0 } else { hit / p.len() as f64 };
        let recall = hit / g.len() as f64;
        let f1 = if hit == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        let m = prf(&p, &g);
        ensure!(
            m.precision == precision && m.recall == recall && m.f1 == f1,
            "trial {trial}: {m:?} vs ({precision}, {recall}, {f1})"
        );
    }
    Ok(())
}

fn saved_bytes(r: &Resource, rules: &RuleSet, dir: &Path) -> BTreeMap<String, Vec<u8>> {
    verblex::io::save_all(r, rules, dir).unwrap();
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn c9_bootstrap(f: &Fixture) -> Check {
    let manacle = f.report.status_of("manacle%2:35:00::").ok_or("manacle not processed")?;
    ensure!(manacle.status.is_accepted() && manacle.iteration == 2, "manacle: {manacle:?}");
    let mut prev: BTreeSet<String> = f.seed.incorporated_keys().iter().map(|k| k.to_string()).collect();
    for n in 1..=3 {
        let options = BootstrapOptions { max_iterations: n, jobs: 1 };
        let (r, _) = bootstrap(&f.corpus, f.seed.clone(), &f.rules, options).map_err(|e| e.to_string())?;
        let now: BTreeSet<String> = r.incorporated_keys().iter().map(|k| k.to_string()).collect();
        ensure!(prev.is_subset(&now), "iteration {n} lost senses");
        prev = now;
    }
    let mut outputs = Vec::new();
    for jobs in [1, 4] {
        let options = BootstrapOptions { max_iterations: 3, jobs };
        let (r, rep) = bootstrap(&f.corpus, f.seed.clone(), &f.rules, options).map_err(|e| e.to_string())?;
        let dir = tempfile::tempdir().unwrap();
        let files = saved_bytes(&r, &f.rules, dir.path());
        outputs.push((files, verblex::io::canonical_json(&rep).unwrap()));
    }
    ensure!(outputs[0] == outputs[1], "jobs 1 and jobs 4 differ");
    Ok(())
}

fn c10_round_trip(f: &Fixture) -> Check {
    for (name, r) in [("seed", &f.seed), ("built", &f.built)] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = saved_bytes(r, &f.rules, a.path());
        let back = verblex::io::load_resource(a.path()).map_err(|e| format!("{name}: {e}"))?;
        ensure!(&back == r, "{name}: load(save(r)) != r");
        let second = saved_bytes(&back, &f.rules, b.path());
        ensure!(first == second, "{name}: saving twice gave different bytes");
    }
    Ok(())
}

fn c11_ablation(f: &Fixture) -> Check {
    let dir = common::fixtures().join("eval");
    let cases = load_cases(&dir.join("role_cases.json")).map_err(|e| e.to_string())?;
    let roles = ablate_roles(&f.seed, &f.corpus, &f.rules, &cases).map_err(|e| e.to_string())?;
    let (sys, base) = (roles.system.unwrap().micro, roles.baseline.unwrap().micro);
    ensure!(sys.f1 > base.f1, "role F1 {} vs baseline {}", sys.f1, base.f1);
    let cases = load_cases(&dir.join("template_cases.json")).map_err(|e| e.to_string())?;
    let templates = ablate_templates(&f.seed, &f.corpus, &f.rules, &cases).map_err(|e| e.to_string())?;
    let (sys, base) = (templates.system.unwrap().micro, templates.baseline.unwrap().micro);
    ensure!(sys.recall > base.recall, "template recall {} vs baseline {}", sys.recall, base.recall);
    Ok(())
}

fn main() {
    let fixture = Fixture::load();
    let f = &fixture;
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("kill pipeline golden", Box::new(|| c1_kill_pipeline(f))),
        ("chaining golden", Box::new(|| c2_chaining(f))),
        ("skeleton rule rows", Box::new(|| c3_skeleton_rows(f))),
        ("classification goldens", Box::new(|| c4_classification(f))),
        ("template goldens", Box::new(|| c5_templates(f))),
        ("consistency golden", Box::new(|| c6_consistency(f))),
        ("wup properties", Box::new(c7_wup)),
        ("metric oracles", Box::new(c8_metric_oracles)),
        ("bootstrap properties", Box::new(|| c9_bootstrap(f))),
        ("round trip", Box::new(|| c10_round_trip(f))),
        ("ablation drivers", Box::new(|| c11_ablation(f))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(()) => println!("criterion {:>2} PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
