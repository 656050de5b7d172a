//! Helpers shared by the integration targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropdiv::io;
use tropdiv_cli::{run, EXIT_INVALID, EXIT_OK};

pub fn suite_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/suite")
}

pub fn suite() -> Vec<(PathBuf, String)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(suite_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "tg"))
        .collect();
    files.sort();
    assert!(files.len() >= 4);
    files.into_iter().map(|p| (p.clone(), std::fs::read_to_string(&p).unwrap())).collect()
}

/// Random edits of the suite documents: byte flips, deletions, duplicated
/// lines and swapped tokens.
pub fn mutate(text: &str, rng: &mut ChaCha8Rng) -> String {
    const PIECES: &[&str] =
        &["inf", "-1", "0", "1/0", "3/2", "@", "@0", "@99", " ", "\n", "vertex", "edge", "chip", "perm", ":", "é", "99999999999999999999999"];
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    for _ in 0..rng.gen_range(1..=3) {
        if lines.is_empty() {
            break;
        }
        let i = rng.gen_range(0..lines.len());
        match rng.gen_range(0..5) {
            0 => {
                lines.remove(i);
            }
            1 => {
                let l = lines[i].clone();
                lines.insert(i, l);
            }
            2 => {
                let mut tokens: Vec<String> = lines[i].split(' ').map(str::to_string).collect();
                let k = rng.gen_range(0..tokens.len());
                tokens[k] = PIECES[rng.gen_range(0..PIECES.len())].to_string();
                lines[i] = tokens.join(" ");
            }
            3 => {
                let j = rng.gen_range(0..lines.len());
                lines.swap(i, j);
            }
            _ => {
                let mut bytes = lines[i].clone().into_bytes();
                if !bytes.is_empty() {
                    let k = rng.gen_range(0..bytes.len());
                    bytes[k] = rng.gen_range(0x20..0x7f);
                }
                lines[i] = String::from_utf8(bytes).unwrap();
            }
        }
    }
    lines.join("\n") + "\n"
}


/// Parses `cases` mutated suite documents and runs `info` on each; panics on
/// any crash or malformed error. Returns how many were rejected.
pub fn fuzz_suite(cases: usize, seed: u64) -> usize {
    let docs = suite();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = std::env::temp_dir().join(format!("tropdiv-fuzz-{}-{seed}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("case.tg");
    let mut rejected = 0;
    for case in 0..cases {
        let (_, text) = &docs[case % docs.len()];
        let mutated = mutate(text, &mut rng);
        match io::parse(&mutated) {
            Err(e) => {
                assert!(e.line >= 1 && e.column >= 1, "{e}");
                rejected += 1;
            }
            Ok(doc) => {
                let out = io::serialize(&doc);
                assert_eq!(io::serialize(&io::parse(&out).unwrap()), out);
            }
        }
        std::fs::write(&file, &mutated).unwrap();
        let out = run(["tropdiv", "info", file.to_str().unwrap()]);
        assert!(out.code == EXIT_OK || out.code == EXIT_INVALID);
    }
    std::fs::remove_dir_all(&dir).ok();
    rejected
}
