use mvg_core::recognizer::{Recognizer, RecognizerConfig};
use mvg_core::samples;
use mvg_core::uvgdl::UvgdlBounds;
use mvg_core::{enumerate_mslig, uvgdl_to_mslig, SearchBounds};
use std::time::Instant;

fn s(word: &str) -> Vec<String> {
    word.chars().map(|c| c.to_string()).collect()
}

#[test]
fn probe() {
    // C1 throughput: cached recognizer on length-10 inputs.
    let g1 = samples::count5();
    let rec = Recognizer::new(&g1).unwrap();
    let cfg = RecognizerConfig {
        index_cap: None,
        op_budget: None,
    };
    let input10 = s("aabbccddee");
    let t = Instant::now();
    let rounds = 20_000;
    let mut acc = 0u64;
    for _ in 0..rounds {
        let r = rec.recognize(&input10, &cfg).unwrap();
        acc += r.accepted as u64;
    }
    let per = t.elapsed() / rounds;
    println!("len-10 recognize: {per:?} each (accepted {acc}), 1.63M -> {:?}", per * 1_630_000);

    let input5 = s("abcde");
    let t = Instant::now();
    for _ in 0..rounds {
        let r = rec.recognize(&input5, &cfg).unwrap();
        acc += r.accepted as u64;
    }
    println!("len-5 recognize: {:?} each", t.elapsed() / rounds);

    // C4: mslig side to 12.
    let g2m = uvgdl_to_mslig(&samples::scrambling_g2()).unwrap().grammar;
    let t = Instant::now();
    let m = enumerate_mslig(&g2m, &SearchBounds::new(12, 240, 48)).unwrap();
    println!(
        "mslig g2conv <=12: {} strings, exhausted={}, {:?}",
        m.strings.len(),
        m.stats.exhausted(),
        t.elapsed()
    );

    // C7: witnesses for all strings.
    let t = Instant::now();
    let mut n = 0usize;
    for w in &m.strings {
        let wit = m.witness(&g2m, w).expect("witness");
        n += wit.len();
    }
    println!("witnesses: {} steps total, {:?}", n, t.elapsed());

    // C4 uvgdl side to 12.
    let t = Instant::now();
    let u = mvg_core::uvgdl::enumerate_uvgdl(&samples::scrambling_g2(), &UvgdlBounds::new(12, 48))
        .unwrap();
    println!(
        "uvgdl g2 <=12: {} strings, exhausted={}, {:?}",
        u.strings.len(),
        u.stats.exhausted(),
        t.elapsed()
    );
    assert_eq!(m.strings, u.strings);
}
