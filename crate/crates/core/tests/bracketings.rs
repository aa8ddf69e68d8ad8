mod common;

use schroder::{BracketingKind, Family, Tree};

use common::brute_force;

const FAMILIES: [(Family, BracketingKind); 4] = [
    (Family::P1, BracketingKind::WordBinary),
    (Family::P2, BracketingKind::WordGeneral),
    (Family::P3, BracketingKind::SetBinary),
    (Family::P4, BracketingKind::SetGeneral),
];

#[test]
fn small_examples() {
    let wb = BracketingKind::WordBinary;
    let two = wb.parse("(xx)(xx)").unwrap();
    assert_eq!(two, Tree::node(vec![Tree::node(vec![Tree::leaf(); 2]), Tree::node(vec![Tree::leaf(); 2])]));
    assert_eq!(wb.serialize(&two).unwrap(), "(xx)(xx)");
    let cat = wb.parse("x(x(xx))").unwrap();
    assert_eq!(cat.out_degrees(), vec![2, 0, 2, 0, 2, 0, 0]);
    assert_eq!(BracketingKind::WordGeneral.serialize(&Tree::node(vec![Tree::leaf(); 3])).unwrap(), "xxx");
    let star = BracketingKind::SetGeneral.parse("{1,2,3}").unwrap();
    assert_eq!(star.degree(), 3);
    assert_eq!(star.leaf_labels(), vec![1, 2, 3]);
}

#[test]
fn set_serialization_is_canonical() {
    let sb = BracketingKind::SetBinary;
    let t = sb.parse("{{4,3},{2,1}}").unwrap();
    assert_eq!(sb.serialize(&t).unwrap(), "{{1,2},{3,4}}");
    assert_eq!(sb.serialize(&sb.parse("{3,{2,1}}").unwrap()).unwrap(), "{{1,2},3}");
}

#[test]
fn kinds_reject_the_wrong_trees() {
    let star = Tree::node(vec![Tree::leaf(); 3]);
    assert!(BracketingKind::WordBinary.serialize(&star).is_err());
    let labeled = BracketingKind::SetGeneral.parse("{1,2}").unwrap();
    assert!(BracketingKind::WordGeneral.serialize(&labeled).is_err());
    assert!(BracketingKind::SetGeneral.serialize(&Tree::node(vec![Tree::leaf(); 2])).is_err());
    assert!(BracketingKind::SetBinary.parse("{1,2,3}").is_err());
    assert!(BracketingKind::WordBinary.parse("xxx").is_err());
}

#[test]
fn malformed_input() {
    for (kind, bad) in [
        (BracketingKind::WordBinary, ""),
        (BracketingKind::WordBinary, "x(x"),
        (BracketingKind::WordBinary, "x)x("),
        (BracketingKind::WordGeneral, "x(x)"),
        (BracketingKind::WordGeneral, "xy"),
        (BracketingKind::SetGeneral, "{1,2"),
        (BracketingKind::SetGeneral, "{1,1}"),
        (BracketingKind::SetGeneral, "{1,3}"),
        (BracketingKind::SetGeneral, "{1}"),
        (BracketingKind::SetGeneral, "{01,2}"),
        (BracketingKind::SetGeneral, "{1,,2}"),
    ] {
        assert!(kind.parse(bad).is_err(), "{} accepted {bad:?}", kind.name());
    }
}

#[test]
fn names_round_trip() {
    for k in BracketingKind::ALL {
        assert_eq!(k.name().parse::<BracketingKind>().unwrap(), k);
    }
}

#[test]
fn round_trip_on_every_small_tree() {
    for (f, kind) in FAMILIES {
        for n in 1..=6 {
            for m in brute_force(&f, n) {
                let s = kind.serialize(&m.tree).unwrap();
                let back = kind.parse(&s).unwrap();
                if f.is_labeled() {
                    assert!(back.same_unordered(&m.tree), "{s}");
                } else {
                    assert_eq!(back, m.tree, "{s}");
                }
                assert_eq!(kind.serialize(&back).unwrap(), s);
            }
        }
    }
}
