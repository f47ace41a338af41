use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn hga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hga")).args(args).env_remove("HGA_SEED").output().unwrap()
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const THREE_CLOCKS: &str =
    "clocks: x=1, y=1, z=1\nlocations: a, b\ninitial: a\nfinal: b\ntrans a -> b on go when x >= cx\n";
const TOGGLING: &str = "clocks: x=2\nlocations: a, b\ninitial: a\nfinal: b\ntrans a -> a on pause toggle {x}\ntrans a -> b on go when x >= cx\n";

#[test]
fn simulate_accepts_and_rejects() {
    let o = hga(&["simulate", &model("egg.hga"), "--word", &model("egg15.word")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ACCEPT elapsed=15 flips=2\n");

    let dir = TempDir::new().unwrap();
    let early = write(dir.path(), "early.word", "delay 6\naction flip\n");
    let o = hga(&["simulate", &model("egg.hga"), "--word", &early]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "REJECT at step 0\n");

    let short = write(dir.path(), "short.word", "delay 7\naction flip\n");
    let o = hga(&["simulate", &model("egg.hga"), "--word", &short]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "REJECT at step 1\n");
}

#[test]
fn check_writes_a_replaying_witness() {
    let dir = TempDir::new().unwrap();
    let w = dir.path().join("w.txt").to_string_lossy().into_owned();
    let o = hga(&["check", &model("egg.hga"), "--refine", "--witness", &w]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "NONEMPTY\n");
    let o = hga(&["simulate", &model("egg.hga"), "--word", &w]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ACCEPT"));
}

#[test]
fn check_reports_empty_languages() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "empty.hga",
        "clocks: x=2\nlocations: a, b\ninitial: a\nfinal: b\ninvariant a: x < cx\ntrans a -> b on go when x >= cx\n",
    );
    let o = hga(&["check", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "EMPTY\n");
}

#[test]
fn refusals_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let three = write(dir.path(), "three.hga", THREE_CLOCKS);
    let o = hga(&["check", &three]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("--unsound"));
    let o = hga(&["check", &three, "--unsound"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));

    let toggling = write(dir.path(), "toggle.hga", TOGGLING);
    let o = hga(&["check", &toggling]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--refine"));
    let o = hga(&["check", &toggling, "--refine"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "NONEMPTY\n");
}

#[test]
fn errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.hga", "clocks: x=7\nlocations: a\ninitial: a\ntrans a -> a on t when x <= 3\n");
    let o = hga(&["check", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.hga:4:29: constant must be 0 or cx"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());

    let missing = dir.path().join("nope.hga").to_string_lossy().into_owned();
    assert_eq!(hga(&["check", &missing]).status.code(), Some(1));
    assert_eq!(hga(&["translate", &missing]).status.code(), Some(1));

    let word = write(dir.path(), "bad.word", "delay 7\n");
    assert_eq!(hga(&["simulate", &model("egg.hga"), "--word", &word]).status.code(), Some(1));

    assert_eq!(hga(&[]).status.code(), Some(1));
    assert_eq!(hga(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hga(&["oracle"]).status.code(), Some(1));
    assert_eq!(hga(&["oracle", "--builtin", "regions", "--grid", "0"]).status.code(), Some(1));
    let o = hga(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("simulate"));
}

#[test]
fn translate_prints_the_forward_automaton() {
    let o = hga(&["translate", &model("egg.hga")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# forward clocks"));
    assert!(text.contains("update {x := cx - x}"), "{text}");
}

#[test]
fn regions_subcommand() {
    let dir = TempDir::new().unwrap();
    let one = write(dir.path(), "one.hga", "clocks: x=1\nlocations: a\ninitial: a\nfinal: a\n");
    let o = hga(&["regions", &one, "--count", "--enumerate", "1/4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("clocks=1 bounds=[1] bound=16\n"), "{text}");
    assert!(text.ends_with("regions=4 grid=1/4\n"), "{text}");

    let o = hga(&["regions", &model("egg.hga"), "--graph"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("s0 boiling |"));
    let o = hga(&["regions", &write(dir.path(), "three.hga", THREE_CLOCKS), "--graph"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_exit_codes_and_determinism() {
    let o = hga(&["oracle", "--builtin", "three-clock"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("t2 < 1/20") && text.contains("t2 = 2/5"));
    assert!(text.ends_with("SUITE three-clock PASS trials=421\n"));

    let args = ["oracle", "--builtin", "consistent-update", "--trials", "300", "--seed", "9"];
    let first = hga(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, hga(&args).stdout);
    let with_env = Command::new(env!("CARGO_BIN_EXE_hga")).args(&args[..5]).env("HGA_SEED", "9").output().unwrap();
    assert_eq!(first.stdout, with_env.stdout);

    let o = hga(&["oracle", &model("egg.hga"), "--budget", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // The graph refuses three clocks, so the cross-check cannot pass.
    let dir = TempDir::new().unwrap();
    let o = hga(&["oracle", &write(dir.path(), "three.hga", THREE_CLOCKS), "--budget", "50", "--max-len", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("SUITE cross-check FAIL"));
}
