//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use pegmachine_cli::fuzz::{fuzz, FuzzConfig};
use pegmachine_cli::EXIT_ACCEPT;
use pegmachine_core::closures::{
    dpda_accepts, left_concat_dcfl, parse_dpda_text, pel_complement, pel_intersection, pel_union, reg_closure_machine,
    CompositionSpec, Dpda,
};
use pegmachine_core::cooksim::{run_linear_table, work_bound, LinearOutcome, LinearReject};
use pegmachine_core::gen::{random_cnf_grammar, random_grammar, rng, GenConfig};
use pegmachine_core::peg::{accepts, interpret_naive, parse_grammar_text, to_cnf, Grammar, ParseOutcome};
use pegmachine_core::pppda::{
    builtin_anbncn, desugar_hat_moves, looping_machine, normalize, run_table, run_traced, Configuration, Machine, Table,
};
use pegmachine_core::translate::{compile, dppda_to_peg};
use pegmachine_core::words::all_words;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../grammars").join(name)
}

fn grammar_file(name: &str) -> Grammar {
    parse_grammar_text(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn show(w: &[char]) -> String {
    w.iter().collect()
}

/// A machine prepared once and run on many words.
struct Runs {
    table: Table,
    limit_per_cell: u64,
}

impl Runs {
    fn new(m: &Machine) -> Self {
        let m = desugar_hat_moves(m);
        Runs {
            table: Table::new(&m).unwrap(),
            limit_per_cell: 1000 * (m.state_count() * m.symbol_count()) as u64,
        }
    }

    fn direct(&self, w: &[char]) -> bool {
        let tape = self.table.encode(w).unwrap();
        run_table(&self.table, tape, self.limit_per_cell * (w.len() as u64 + 2)).outcome.accepted()
    }

    fn cook(&self, w: &[char]) -> bool {
        run_linear_table(&self.table, &self.table.encode(w).unwrap()).outcome.accepted()
    }
}

fn naive(g: &Grammar, w: &[char]) -> bool {
    interpret_naive(g, g.rule(g.axiom()), w, 0, 10_000_000) == ParseOutcome::Consumed(w.len())
}

fn trace_replay() -> Outcome {
    let m = desugar_hat_moves(&builtin_anbncn());
    let w: Vec<char> = "aaabbbccc".chars().collect();
    let (report, events) = run_traced(&m, &w, 10_000).map_err(|e| e.to_string())?;
    if !report.outcome.accepted() {
        return Err(format!("run ended with {:?}", report.outcome));
    }
    let mut seen = vec![Configuration::initial(&m).display(&m).to_string()];
    seen.extend(events.iter().map(|e| e.after.display(&m).to_string()));
    // The listed run, with the next-to-last configuration in state q1.
    let checkpoints = [
        "(q0, Z0×0, 0)",
        "(q0, YZ0×1:0, 1)",
        "(q0, XYZ0×2:1:0, 2)",
        "(q0, XXXYZ0×4:3:2:1:0, 4)",
        "(q0, XXYZ0×3:2:1:0, 5)",
        "(q0, YZ0×1:0, 7)",
        "(q1, Z0×0, 1)",
        "(q1, Z0×0, 4)",
        "(q1, XZ0×5:0, 5)",
        "(q1, XXXZ0×7:6:5:0, 7)",
        "(q1, XXZ0×6:5:0, 8)",
        "(q1, Z0×0, 10)",
        "(qf, (), 10)",
    ];
    let mut at = 0;
    for c in checkpoints {
        match seen[at..].iter().position(|s| s == c) {
            Some(k) => at += k + 1,
            None => return Err(format!("checkpoint {c} not reached in order")),
        }
    }
    if seen.last().map(String::as_str) != Some("(qf, (), 10)") {
        return Err("run does not end at the last checkpoint".into());
    }
    Ok(format!("{} checkpoints matched over {} moves", checkpoints.len(), events.len()))
}

fn example_grammars() -> Outcome {
    let ordered = grammar_file("ordered.peg");
    let runs = Runs::new(&compile(&ordered).map_err(|e| e.to_string())?);
    for (word, expected) in [("aab", true), ("abbc", false)] {
        let w: Vec<char> = word.chars().collect();
        let got = [naive(&ordered, &w), accepts(&ordered, &w), runs.direct(&w), runs.cook(&w)];
        if got.iter().any(|&g| g != expected) {
            return Err(format!("{word}: naive/packrat/direct/cook gave {got:?}"));
        }
    }
    let is_ab_or_ac = |w: &[char]| {
        let k = w.iter().take_while(|&&c| c == 'a').count();
        let rest = &w[k..];
        rest.len() == k && (rest.iter().all(|&c| c == 'b') || rest.iter().all(|&c| c == 'c'))
    };
    let is_abc = |w: &[char]| {
        let k = w.len() / 3;
        k >= 1 && w.len() == 3 * k && w.iter().enumerate().all(|(i, &c)| c == ['a', 'b', 'c'][i / k])
    };
    let mut checked = 0;
    for (file, oracle) in [("ab_or_ac.peg", &is_ab_or_ac as &dyn Fn(&[char]) -> bool), ("anbncn.peg", &is_abc)] {
        let g = grammar_file(file);
        for w in all_words(g.alphabet(), 9) {
            if accepts(&g, &w) != oracle(&w) {
                return Err(format!("{file} on {:?}", show(&w)));
            }
            checked += 1;
        }
    }
    Ok(format!("4 engines on the ordered-choice grammar, {checked} words on the two language grammars"))
}

fn cnf_corpus(n: usize) -> Vec<Grammar> {
    let mut r = rng(1);
    let cfg = GenConfig {
        max_nonterminals: 5,
        alphabet_size: 2,
        max_depth: 3,
    };
    (0..n).map(|_| random_cnf_grammar(&mut r, &cfg).into_grammar()).collect()
}

fn compile_equivalence() -> Outcome {
    let words = all_words(&['a', 'b'], 6);
    for (i, g) in cnf_corpus(500).iter().enumerate() {
        let runs = Runs::new(&compile(g).map_err(|e| e.to_string())?);
        for w in &words {
            if runs.direct(w) != accepts(g, w) {
                return Err(format!("grammar {i} on {:?}", show(w)));
            }
        }
    }
    Ok(format!("500 grammars × {} words", words.len()))
}

fn extract_equivalence() -> Outcome {
    let words = all_words(&['a', 'b'], 6);
    for (i, g) in cnf_corpus(500).iter().enumerate() {
        let m = normalize(&compile(g).map_err(|e| e.to_string())?);
        let h = dppda_to_peg(&m).map_err(|e| e.to_string())?;
        let runs = Runs::new(&m);
        for w in &words {
            if accepts(&h, w) != runs.direct(w) {
                return Err(format!("grammar {i} on {:?}", show(w)));
            }
        }
    }
    Ok(format!("500 grammars × {} words", words.len()))
}

fn linearity() -> Outcome {
    let m = builtin_anbncn();
    let runs = Runs::new(&m);
    let mut ops = Vec::new();
    for n in [50, 100, 200, 400] {
        let w: Vec<char> = format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n)).chars().collect();
        let r = run_linear_table(&runs.table, &runs.table.encode(&w).unwrap());
        if !r.outcome.accepted() || r.ops > work_bound(&m, w.len()) {
            return Err(format!("n={n}: {:?}, ops {} bound {}", r.outcome, r.ops, work_bound(&m, w.len())));
        }
        ops.push(r.ops);
    }
    let ratios: Vec<f64> = ops.windows(2).map(|p| p[1] as f64 / p[0] as f64).collect();
    if let Some(r) = ratios.iter().find(|r| !(1.8..=2.2).contains(*r)) {
        return Err(format!("ratio {r:.3} outside [1.8, 2.2]"));
    }
    let looping = Runs::new(&looping_machine(['a']));
    let mut worst = Duration::ZERO;
    for n in 0..=10_000 {
        let start = Instant::now();
        let w = vec!['a'; n];
        let r = run_linear_table(&looping.table, &looping.table.encode(&w).unwrap());
        worst = worst.max(start.elapsed());
        if !matches!(r.outcome, LinearOutcome::Reject(LinearReject::Loop(_))) {
            return Err(format!("looping machine at n={n}: {:?}", r.outcome));
        }
    }
    if worst >= Duration::from_millis(10) {
        return Err(format!("looping machine took {worst:?}"));
    }
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok(format!("ratios {}, loop detected in ≤ {worst:?}", shown.join(" ")))
}

fn cnf_preserves_acceptance() -> Outcome {
    let mut r = rng(6);
    let cfg = GenConfig::default();
    let words = all_words(&cfg.alphabet(), 6);
    for i in 0..200 {
        let g = random_grammar(&mut r, &cfg);
        let c = to_cnf(&pegmachine_core::peg::desugar(&g)).map_err(|e| e.to_string())?;
        for w in &words {
            if accepts(&g, w) != accepts(c.grammar(), w) {
                return Err(format!("grammar {i} on {:?}", show(w)));
            }
        }
    }
    Ok(format!("200 grammars × {} words", words.len()))
}

fn boolean_identities() -> Outcome {
    let mut r = rng(7);
    let cfg = GenConfig::default();
    let words = all_words(&cfg.alphabet(), 6);
    for i in 0..50 {
        let g1 = random_grammar(&mut r, &cfg);
        let g2 = random_grammar(&mut r, &cfg);
        let not1 = pel_complement(&g1);
        let or = pel_union(&g1, &g2).map_err(|e| e.to_string())?;
        let and = pel_intersection(&g1, &g2).map_err(|e| e.to_string())?;
        for w in &words {
            let (a, b) = (accepts(&g1, w), accepts(&g2, w));
            if accepts(&not1, w) == a || accepts(&or, w) != (a || b) || accepts(&and, w) != (a && b) {
                return Err(format!("pair {i} on {:?}", show(w)));
            }
        }
    }
    Ok(format!("50 pairs × {} words", words.len()))
}

fn dpda(name: &str) -> Dpda {
    parse_dpda_text(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

/// Membership by trying every factorization along the DFA.
fn factorizations(spec: &CompositionSpec, q: usize, rest: &[char]) -> bool {
    if rest.is_empty() {
        return spec.dfa.is_final(q);
    }
    (1..=rest.len()).any(|i| {
        (0..spec.bindings.len()).any(|j| {
            dpda_accepts(&spec.bindings[j], &rest[..i]) && factorizations(spec, spec.dfa.next(q, j), &rest[i..])
        })
    })
}

fn closures() -> Outcome {
    let mut checked = 0;
    let x = dpda("anbn.dpda");
    let y = grammar_file("c_star.peg");
    let m = left_concat_dcfl(&x, &compile(&y).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let runs = Runs::new(&m);
    for w in all_words(&['a', 'b', 'c'], 8) {
        let expected = (0..=w.len()).any(|i| dpda_accepts(&x, &w[..i]) && accepts(&y, &w[i..]));
        if runs.direct(&w) != expected || runs.cook(&w) != expected {
            return Err(format!("concatenation on {:?}", show(&w)));
        }
        checked += 1;
    }

    let pairs = CompositionSpec::load(&data("pairs.comp")).map_err(|e| e.to_string())?;
    let star_dfa = pegmachine_core::closures::parse_dfa_text(
        "@kind dfa\n@states s\n@initial s\n@final s\n@labels a1\ns a1 -> s\n",
    )
    .map_err(|e| e.to_string())?;
    let star = CompositionSpec::new(star_dfa, HashMap::from([("a1".to_string(), x.clone())]))
        .map_err(|e| e.to_string())?;
    for (name, spec) in [("pairs", &pairs), ("star", &star)] {
        let runs = Runs::new(&reg_closure_machine(spec).map_err(|e| e.to_string())?);
        for w in all_words(&spec.alphabet(), 8) {
            let expected = factorizations(spec, spec.dfa.initial(), &w);
            if runs.direct(&w) != expected || runs.cook(&w) != expected {
                return Err(format!("{name} on {:?}", show(&w)));
            }
            checked += 1;
        }
    }
    Ok(format!("3 specs, {checked} words"))
}

fn fuzz_seed_one() -> Outcome {
    let mut out = Vec::new();
    let code = fuzz(&FuzzConfig::default(), &mut out).map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out);
    if code != EXIT_ACCEPT {
        return Err(format!("exit {code}\n{text}"));
    }
    Ok(text.lines().next().unwrap_or_default().to_string())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("trace replay of the aⁿbⁿcⁿ machine", trace_replay, Duration::from_secs(1)),
        ("example grammars", example_grammars, Duration::from_secs(10)),
        ("compiled machines match packrat", compile_equivalence, Duration::from_secs(300)),
        ("extracted grammars match machines", extract_equivalence, Duration::from_secs(600)),
        ("linear-time simulation work", linearity, Duration::from_secs(30)),
        ("normal form preserves acceptance", cnf_preserves_acceptance, Duration::from_secs(120)),
        ("boolean combinators", boolean_identities, Duration::from_secs(120)),
        ("concatenation and regular closure", closures, Duration::from_secs(120)),
        ("engine cross-agreement fuzz", fuzz_seed_one, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail} ({:.2?})", i + 1, took),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why} ({:.2?})", i + 1, took);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
