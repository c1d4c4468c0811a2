//! End-to-end tests of the binary: every numerical output must be
//! bit-identical to the corresponding direct library call, file transforms
//! must round-trip byte-exactly, and exit codes must follow the
//! 0 / 1 / 2 convention.

use std::path::PathBuf;
use std::process::{Command, Output};

use ffb::cumulants::{Letter, MomentFunctional, MomentTable, TableKind, Word};
use ffb::Face;

fn ffb_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ffb"))
}

fn run(args: &[&str]) -> Output {
    ffb_bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ffb-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn enumerate_counts_and_lists() {
    let out = stdout(&run(&["ibnc", "enumerate", "--chi", "lcl", "--list"]));
    assert_eq!(out, "count: 4\n1,2,3\n1,2|3\n1|2,3\n1|2|3\n");
    let out = stdout(&run(&["ibnc", "enumerate", "--chi", "llrclcrl"]));
    assert_eq!(out, "count: 350\n");
    // The count equals a direct library call, line for line.
    let chi: ffb::ChiMap = "llrcrcrl".parse().unwrap();
    let expected = format!("count: {}\n", ffb::enumerate_ibnc(&chi).unwrap().len());
    assert_eq!(
        stdout(&run(&["ibnc", "enumerate", "--chi", "llrcrcrl"])),
        expected
    );
}

#[test]
fn enumerate_rejects_bad_labels() {
    let out = run(&["ibnc", "enumerate", "--chi", "lxc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid face"));
}

#[test]
fn diagram_matches_library_render() {
    let chi: ffb::ChiMap = "llrcrcrl".parse().unwrap();
    let pi: ffb::Partition = "1,2|3,4,6,8|5|7".parse().unwrap();
    let expected = ffb::render_diagram(&chi, Some(&pi)).unwrap();
    let out = stdout(&run(&[
        "ibnc",
        "diagram",
        "--chi",
        "llrcrcrl",
        "--partition",
        "1,2|3,4,6,8|5|7",
    ]));
    assert_eq!(out, expected);
    assert_eq!(out.lines().count(), 8);
}

#[test]
fn mobius_single_values() {
    assert_eq!(
        stdout(&run(&[
            "mobius", "--chi", "lcl", "--from", "1|2|3", "--to", "1,2,3"
        ])),
        "1\n"
    );
    assert_eq!(
        stdout(&run(&[
            "mobius", "--chi", "llll", "--from", "1|2|3|4", "--to", "1,2,3,4"
        ])),
        "-5\n"
    );
    assert_eq!(
        stdout(&run(&[
            "mobius", "--chi", "lr", "--from", "1|2", "--to", "1,2"
        ])),
        "-1\n"
    );
}

#[test]
fn mobius_rejects_incomparable_pairs() {
    let out = run(&[
        "mobius", "--chi", "llll", "--from", "1,2|3,4", "--to", "1,4|2,3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not <="));
}

#[test]
fn mobius_table_matches_library() {
    let out = stdout(&run(&["mobius", "--chi", "lcl", "--format", "csv"]));
    let lattice = ffb::lattice_for(&"lcl".parse().unwrap()).unwrap();
    let mut expected = String::from("sigma\\pi");
    for pi in lattice.elements() {
        expected.push(',');
        expected.push_str(&pi.to_string());
    }
    expected.push('\n');
    for i in 0..lattice.len() {
        expected.push_str(&lattice.element(i).to_string());
        for j in 0..lattice.len() {
            expected.push(',');
            if lattice.leq_idx(i, j) {
                expected.push_str(&lattice.mobius_idx(i, j).to_string());
            }
        }
        expected.push('\n');
    }
    assert_eq!(out, expected);
}

fn semicircle_table(face: Face) -> MomentTable {
    let letter = Letter::new("1", face, "x");
    let mut table = MomentTable::new(vec![letter.clone()]);
    let moments = [0i64, 1, 0, 2];
    for (k, &m) in moments.iter().enumerate() {
        let word = Word::new(vec![letter.clone(); k + 1]).unwrap();
        table
            .insert(&word, num::BigRational::from(num::BigInt::from(m)))
            .unwrap();
    }
    table
}

#[test]
fn transform_specializations_and_roundtrip() {
    let dir = temp_dir("transform");
    let moments_path = dir.join("moments.json");
    let kappa_path = dir.join("kappa.json");
    let back_path = dir.join("back.json");

    // All-left letters: the third-order-free reduction gives kappa_2 = 1 and
    // kappa_4 = 0 on the semicircle-like table.
    let table = semicircle_table(Face::Left);
    std::fs::write(&moments_path, table.to_json(TableKind::Moments)).unwrap();
    stdout(&run(&[
        "transform",
        "to-cumulants",
        "--input",
        moments_path.to_str().unwrap(),
        "--output",
        kappa_path.to_str().unwrap(),
    ]));
    let (kappa, kind) =
        MomentTable::from_json(&std::fs::read_to_string(&kappa_path).unwrap()).unwrap();
    assert_eq!(kind, TableKind::Cumulants);
    let letter = Letter::new("1", Face::Left, "x");
    let k2 = kappa
        .moment(&Word::new(vec![letter.clone(); 2]).unwrap())
        .unwrap();
    let k4 = kappa
        .moment(&Word::new(vec![letter.clone(); 4]).unwrap())
        .unwrap();
    assert_eq!(k2.to_string(), "1");
    assert_eq!(k4.to_string(), "0");

    // Back to moments: byte-identical to the canonical original.
    stdout(&run(&[
        "transform",
        "to-moments",
        "--input",
        kappa_path.to_str().unwrap(),
        "--output",
        back_path.to_str().unwrap(),
    ]));
    assert_eq!(
        std::fs::read(&back_path).unwrap(),
        std::fs::read(&moments_path).unwrap(),
        "round trip must be byte-identical"
    );

    // All-central letters on the same numbers: kappa_4 becomes 1.
    let table = semicircle_table(Face::Central);
    std::fs::write(&moments_path, table.to_json(TableKind::Moments)).unwrap();
    let out = stdout(&run(&[
        "transform",
        "to-cumulants",
        "--input",
        moments_path.to_str().unwrap(),
    ]));
    let (kappa, _) = MomentTable::from_json(&out).unwrap();
    let letter = Letter::new("1", Face::Central, "x");
    let k4 = kappa.moment(&Word::new(vec![letter; 4]).unwrap()).unwrap();
    assert_eq!(k4.to_string(), "1");

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn convolve_with_zero_family_is_identity() {
    let dir = temp_dir("convolve");
    let a_path = dir.join("a.json");
    let zero_path = dir.join("zero.json");
    let out_path = dir.join("out.json");

    let table = semicircle_table(Face::Left);
    std::fs::write(&a_path, table.to_json(TableKind::Moments)).unwrap();
    let letter = Letter::new("1", Face::Left, "x");
    let mut zero = MomentTable::new(vec![letter.clone()]);
    for k in 1..=4usize {
        let word = Word::new(vec![letter.clone(); k]).unwrap();
        zero.insert(&word, num::BigRational::from(num::BigInt::from(0)))
            .unwrap();
    }
    std::fs::write(&zero_path, zero.to_json(TableKind::Moments)).unwrap();

    stdout(&run(&[
        "convolve",
        "--input",
        a_path.to_str().unwrap(),
        "--with",
        zero_path.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--max-n",
        "4",
    ]));
    assert_eq!(
        std::fs::read(&out_path).unwrap(),
        std::fs::read(&a_path).unwrap(),
        "convolving with the zero family returns the input"
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fock_moment_queries() {
    let out = stdout(&run(&[
        "fock",
        "moments",
        "--indices",
        "2",
        "--max-n",
        "2",
        "--word",
        "1:l:annihilation 1:l:creation",
    ]));
    assert_eq!(out, "1\n");
    // Without a word, the listing covers every generator word and matches the
    // library value on a spot-checked line.
    let listing = stdout(&run(&["fock", "moments", "--indices", "1", "--max-n", "2"]));
    assert!(listing.contains("1:l:annihilation 1:l:creation = 1"));
    assert!(listing.contains("1:l:creation = 0"));
}

#[test]
fn fock_dump_matches_library() {
    let out = stdout(&run(&[
        "fock",
        "dump",
        "--indices",
        "2",
        "--degree",
        "3",
        "--op",
        "l1",
    ]));
    let basis = ffb::fock::build_basis(2, 3).unwrap();
    let one = num::BigRational::from(num::BigInt::from(1));
    let zero = num::BigRational::from(num::BigInt::from(0));
    let e1 = vec![one, zero];
    let expected = ffb::fock::left_creation(&basis, &e1).unwrap().dump_csv();
    assert_eq!(out, expected);
    let bad = run(&[
        "fock",
        "dump",
        "--indices",
        "2",
        "--degree",
        "3",
        "--op",
        "q9",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn clt_demo_prints_exact_scaling() {
    let out = stdout(&run(&["clt", "demo", "--max-n", "4"]));
    assert!(out.contains("scaling exact: PASS"));
    assert!(out.contains("order 4"));
}

#[test]
fn verify_suites_and_exit_codes() {
    let out = run(&["verify", "mobius", "--samples", "8", "--max-n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[PASS]"));
    assert!(text.contains("all checks passed"));

    let json = run(&[
        "verify",
        "mobius",
        "--samples",
        "5",
        "--max-n",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(json.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_slice(&json.stdout).expect("valid json report");
    assert_eq!(parsed["suite"], "mobius");

    let unknown = run(&["verify", "nonsense"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn lattice_cache_dir_is_honored() {
    let dir = temp_dir("cache");
    let out = ffb_bin()
        .env("IBNC_CACHE_DIR", &dir)
        .args(["ibnc", "enumerate", "--chi", "lcrl"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let cached = dir.join("ibnc-lcrl.json");
    assert!(
        cached.exists(),
        "cache file missing at {}",
        cached.display()
    );
    // A second run reads the cache and reports the same count.
    let again = ffb_bin()
        .env("IBNC_CACHE_DIR", &dir)
        .args(["ibnc", "enumerate", "--chi", "lcrl"])
        .output()
        .unwrap();
    assert_eq!(out.stdout, again.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
