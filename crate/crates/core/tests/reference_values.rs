//! Values frozen from reference implementations (sacrebleu 2.6, scipy 1.15)
//! and small hand tallies.

use forge_core::stats::{pearson, spearman, two_proportion_test};
use forge_core::textmetrics::{bleu, chrf_pp, rouge1, ChrfParams};

/// `sacrebleu.sentence_chrf(hyp, [ref], word_order=2).score / 100`
const SACREBLEU_CHRF_PP: [(&str, &str, f64); 10] = [
    ("night", "nacht", 0.14166666666666666),
    ("The cat sat on the mat.", "The cat sat on the mat.", 1.0),
    ("The cat sat on the mat.", "A cat was sitting on a mat!", 0.18330497418728126),
    ("How many squares are in the figure?", "How many squares does the figure contain?", 0.6609033012529815),
    ("Which number should replace the question mark?", "What number replaces the question mark ?", 0.5884705876742664),
    ("El canguro salta tres veces.", "El canguro saltó tres veces", 0.7314179716894302),
    ("Quelle est la plus petite somme possible ?", "Quelle est la somme la plus petite possible?", 0.826547223636812),
    ("Kiasi gani cha maji kimebaki?", "Ni maji kiasi gani yaliyobaki?", 0.44190803046415617),
    ("(A) 12, (B) 15, (C) 18", "A) 12 B) 15 C) 18", 0.3613049505483589),
    ("Größe und Höhe", "Grösse und Hohe", 0.3137416041696413),
];

#[test]
fn chrf_pp_matches_sacrebleu() {
    let params = ChrfParams::default();
    for (reference, hypothesis, expected) in SACREBLEU_CHRF_PP {
        let got = chrf_pp(reference, hypothesis, &params).value;
        assert!((got - expected).abs() < 1e-12, "{reference:?} / {hypothesis:?}: {got} vs {expected}");
    }
}

#[test]
fn bleu_hand_tally() {
    // Precisions 5/5, 3/4, 2/3, 1/2; geometric mean 0.25^(1/4); BP exp(1 - 6/5).
    let expected = 0.25f64.powf(0.25) * (-0.2f64).exp();
    let got = bleu("the cat sat on the mat", "the cat sat on mat", 4).value;
    assert!((got - expected).abs() < 1e-12);
    // sacrebleu with tokenize='none', smooth_method='none'
    assert!((got - 0.57893006746741).abs() < 1e-12);
}

#[test]
fn rouge1_hand_tally() {
    // "the" is clipped to its single reference occurrence: 2 matches.
    let r = rouge1("the cat sat", "the the cat");
    assert!((r.precision - 2.0 / 3.0).abs() < 1e-12);
    assert!((r.recall - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn spearman_with_ties_matches_scipy() {
    let r = spearman::<f64>(&[1.0, 2.0, 2.0, 3.0, 5.0, 5.0], &[2.0, 1.0, 3.0, 3.0, 4.0, 6.0]).unwrap();
    assert!((r.rho - 0.8508410434878082).abs() < 1e-12);
    assert!((r.p_value - 0.031713317822196836).abs() < 1e-9);
}

#[test]
fn pearson_matches_scipy() {
    let r = pearson::<f64>(&[1.5, 2.0, 3.7, 4.1, 6.0], &[2.2, 2.9, 3.1, 5.5, 5.4]).unwrap();
    assert!((r.rho - 0.8612069702859437).abs() < 1e-12);
    assert!((r.p_value - 0.06076180881557258).abs() < 1e-9);
}

#[test]
fn two_proportion_matches_normal_tail() {
    // z = 0.1 / sqrt(0.55 * 0.45 * 0.02); p = 2 * norm.sf(z)
    let p = two_proportion_test(60, 100, 50, 100).unwrap();
    assert!((p - 0.1552184896846841).abs() < 1e-10, "{p}");
}
