use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../grammars").join(name)
}

fn pegmachine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pegmachine"))
        .args(args)
        .env_remove("PEGMACHINE_STEP_LIMIT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let ok = pegmachine(&["check", p(&data("ordered.peg"))]);
    assert_eq!(code(&ok), 0);
    assert_eq!(first_line(&ok), "well-formed");

    let bad = pegmachine(&["check", p(&data("left_recursive.peg"))]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("E -> E"));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.peg");
    std::fs::write(&broken, "S <- (\"a\"\n").unwrap();
    let o = pegmachine(&["check", p(&broken)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    assert_eq!(code(&pegmachine(&["check", p(&data("anbncn.pm"))])), 0);
    assert_eq!(code(&pegmachine(&["check", p(&data("pairs.comp"))])), 0);
}

#[test]
fn run_under_every_engine() {
    let g = data("ordered.peg");
    for engine in ["naive", "packrat", "direct", "cook"] {
        let yes = pegmachine(&["run", "--engine", engine, p(&g), "aab"]);
        assert_eq!((code(&yes), first_line(&yes)), (0, "accept".to_string()), "{engine}");
        let no = pegmachine(&["run", "--engine", engine, p(&g), "abbc"]);
        assert_eq!((code(&no), first_line(&no)), (1, "reject".to_string()), "{engine}");
    }
    let m = data("anbncn.pm");
    for engine in ["naive", "packrat", "direct", "cook"] {
        let o = pegmachine(&["run", "--engine", engine, p(&m), "aaabbbccc"]);
        assert_eq!(code(&o), 0, "{engine}");
        assert_eq!(code(&pegmachine(&["run", "--engine", engine, p(&m), "aabbbccc"])), 1, "{engine}");
    }
}

#[test]
fn empty_word_and_empty_grammar() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("eps.peg");
    std::fs::write(&g, "S <- \"\"\n@alphabet \"a\"\n").unwrap();
    assert_eq!(code(&pegmachine(&["run", p(&g)])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&g), ""])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&g), "a"])), 1);
}

#[test]
fn letters_outside_the_alphabet_are_invalid() {
    let o = pegmachine(&["run", p(&data("anbncn.pm")), "abd"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).is_empty());
    assert_eq!(code(&pegmachine(&["run", p(&data("ordered.peg")), "x"])), 2);
}

#[test]
fn input_file_drops_one_newline() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("word.txt");
    std::fs::write(&w, "aabbcc\n").unwrap();
    let o = pegmachine(&["run", p(&data("anbncn.pm")), "--input-file", p(&w)]);
    assert_eq!(code(&o), 0);
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = pegmachine(&["run", "--step-limit", "3", p(&data("anbncn.pm")), "aaabbbccc"]);
    assert_eq!(code(&o), 3);
    assert_eq!(first_line(&o), "budget-exhausted");
    let env = Command::new(env!("CARGO_BIN_EXE_pegmachine"))
        .args(["run", p(&data("anbncn.pm")), "aaabbbccc"])
        .env("PEGMACHINE_STEP_LIMIT", "3")
        .output()
        .unwrap();
    assert_eq!(code(&env), 3);
}

#[test]
fn stats_follow_a_separator() {
    let o = pegmachine(&["run", "--engine", "cook", "--stats", p(&data("anbncn.pm")), "aaabbbccc"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "accept");
    assert_eq!(lines[1], "---");
    let ops = lines.iter().find_map(|l| l.strip_prefix("cook.ops=")).unwrap();
    assert!(ops.parse::<u64>().unwrap() > 0);
    assert!(lines[2..].iter().all(|l| l.contains('=')));

    let o = pegmachine(&["run", "--engine", "direct", "--stats", p(&data("anbncn.pm")), "abc"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("direct.steps=")));
}

#[test]
fn trace_rows() {
    let o = pegmachine(&["trace", p(&data("anbncn.pm")), "abc"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.len() == 7));
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (i + 1).to_string());
    }
    let last = rows.last().unwrap();
    assert_eq!((last[1], last[2], last[4]), ("pop", "qf", "0"));
    assert_eq!(stdout(&o), stdout(&pegmachine(&["run", "--trace", p(&data("anbncn.pm")), "abc"])));
}

#[test]
fn compile_cnf_desugar_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.peg");
    let c = dir.path().join("c.peg");
    let m = dir.path().join("m.pm");
    assert_eq!(code(&pegmachine(&["desugar", p(&data("ordered.peg")), "-o", p(&d)])), 0);
    assert_eq!(code(&pegmachine(&["cnf", p(&d), "-o", p(&c)])), 0);
    assert_eq!(code(&pegmachine(&["compile", p(&c), "-o", p(&m)])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&m), "aab"])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&m), "abbc"])), 1);
}

#[test]
fn extract_after_normalize() {
    let dir = tempfile::tempdir().unwrap();
    let n = dir.path().join("n.pm");
    let g = dir.path().join("g.peg");
    assert_eq!(code(&pegmachine(&["normalize", p(&data("anbncn.pm")), "-o", p(&n)])), 0);
    assert_eq!(code(&pegmachine(&["extract", p(&n), "-o", p(&g)])), 0);
    assert_eq!(code(&pegmachine(&["check", p(&g)])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&g), "aabbcc"])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&g), "aabbc"])), 1);
    // Extraction also normalizes on its own.
    let direct = pegmachine(&["extract", p(&data("anbncn.pm"))]);
    assert_eq!(stdout(&direct), std::fs::read_to_string(&g).unwrap());
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["compile", p(&data("ab_or_ac.peg"))],
        vec!["cnf", p(&data("anbncn.peg"))],
        vec!["extract", p(&data("anbncn.pm"))],
        vec!["compose", "reg-closure", p(&data("pairs.comp"))],
    ] {
        let a = pegmachine(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, pegmachine(&args).stdout, "{args:?}");
    }
}

#[test]
fn cnf_of_a_normal_form_grammar_only_adds_an_axiom() {
    let once = stdout(&pegmachine(&["cnf", p(&data("ordered.peg"))]));
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cnf.peg");
    std::fs::write(&f, &once).unwrap();
    let twice = stdout(&pegmachine(&["cnf", p(&f)]));
    let rules = |s: &str| s.lines().filter(|l| l.contains("<-")).count();
    assert!(rules(&twice) <= rules(&once) + 1);
}

#[test]
fn compose_union_and_regular_closure() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.peg");
    let o = pegmachine(&["compose", "union", p(&data("anbn.peg")), p(&data("ancn.peg")), "-o", p(&u)]);
    assert_eq!(code(&o), 0);
    for (w, expected) in [("aabb", 0), ("aacc", 0), ("", 0), ("aabc", 1)] {
        assert_eq!(code(&pegmachine(&["run", p(&u), w])), expected, "{w}");
    }

    let r = dir.path().join("r.pm");
    assert_eq!(code(&pegmachine(&["compose", "reg-closure", p(&data("pairs.comp")), "-o", p(&r)])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&r), "abcd"])), 0);
    assert_eq!(code(&pegmachine(&["run", "--engine", "cook", p(&r), "abcdaabbd"])), 0);
    assert_eq!(code(&pegmachine(&["run", p(&r), "abab"])), 1);
    // Compositions run directly too.
    assert_eq!(code(&pegmachine(&["run", p(&data("pairs.comp")), "abcd"])), 0);
}

#[test]
fn compose_concat_dcfl() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.pm");
    let o = pegmachine(&["compose", "concat-dcfl", p(&data("anbn.dpda")), p(&data("c_star.peg")), "-o", p(&c)]);
    assert_eq!(code(&o), 0);
    for (w, expected) in [("abccc", 0), ("aabb", 0), ("aab", 1), ("c", 1)] {
        assert_eq!(code(&pegmachine(&["run", p(&c), w])), expected, "{w}");
    }
}

#[test]
fn complement_twice_keeps_the_language() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.peg");
    let twice = dir.path().join("twice.peg");
    pegmachine(&["compose", "complement", p(&data("ordered.peg")), "-o", p(&once)]);
    pegmachine(&["compose", "complement", p(&once), "-o", p(&twice)]);
    for w in ["", "a", "aab", "abbc", "bcc", "aabbb", "cab"] {
        let orig = code(&pegmachine(&["run", p(&data("ordered.peg")), w]));
        assert_ne!(orig, code(&pegmachine(&["run", p(&once), w])), "{w}");
        assert_eq!(orig, code(&pegmachine(&["run", p(&twice), w])), "{w}");
    }
}

#[test]
fn bench_table() {
    let o = pegmachine(&[
        "bench",
        p(&data("anbncn.pm")),
        "--family",
        "a^n b^n c^n",
        "--sizes",
        "0,50,100,200",
        "--assert-linear",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n cook.ops direct.steps");
    let zero: Vec<u64> = lines[1].split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(zero[0], 0);
    assert!(text.contains("linear=yes"));

    let peg = pegmachine(&["bench", p(&data("ordered.peg")), "--family", "a^n", "--sizes", "50,100,200", "--assert-linear"]);
    assert_eq!(code(&peg), 0, "{}", stdout(&peg));
}

#[test]
fn fuzz_runs() {
    let o = pegmachine(&["fuzz", "--cases", "0"]);
    assert_eq!(code(&o), 0);
    let a = pegmachine(&["fuzz", "--seed", "3", "--cases", "30"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, pegmachine(&["fuzz", "--seed", "3", "--cases", "30"]).stdout);

    let bad = pegmachine(&["fuzz", "--cases", "10", "--corrupt", "extracted"]);
    assert_eq!(code(&bad), 4);
    let text = stdout(&bad);
    let shrunk = text.split("shrunk\n").nth(1).unwrap();
    let header = shrunk.lines().next().unwrap();
    let word = header.split("word ").nth(1).unwrap().trim_matches('"');
    assert_eq!(word.chars().count(), 1, "{header}");
    assert!(shrunk.contains("extracted=") && shrunk.contains("@start"));
}
