//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the library's counting or enumeration code: trees
//! are generated as preorder degree words and labeled by brute force.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use schroder::{Family, Tree};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Every preorder degree word of a tree with `n` leaves whose internal
/// out-degrees are at least 2 (exactly 2 when `binary`).
pub fn degree_words(n: usize, binary: bool) -> Vec<Vec<usize>> {
    fn go(n: usize, binary: bool, word: &mut Vec<usize>, open: usize, leaves: usize, out: &mut Vec<Vec<usize>>) {
        if open == 0 {
            if leaves == n {
                out.push(word.clone());
            }
            return;
        }
        // each open slot needs at least one more leaf
        if leaves + open > n {
            return;
        }
        word.push(0);
        go(n, binary, word, open - 1, leaves + 1, out);
        word.pop();
        let max = if binary { 2 } else { n };
        for d in 2..=max {
            if leaves + open - 1 + d > n {
                break;
            }
            word.push(d);
            go(n, binary, word, open - 1 + d, leaves, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    go(n, binary, &mut Vec::new(), 1, 0, &mut out);
    out
}

/// Tree from a preorder degree word, built without the library parser.
pub fn tree_of(word: &[usize]) -> Tree {
    fn build(word: &[usize], pos: &mut usize) -> Tree {
        let d = word[*pos];
        *pos += 1;
        if d == 0 {
            Tree::leaf()
        } else {
            Tree::node((0..d).map(|_| build(word, pos)).collect())
        }
    }
    let mut pos = 0;
    build(word, &mut pos)
}

/// Heights of the leaves of a degree word, in preorder.
pub fn leaf_heights(word: &[usize]) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for &d in word {
        let depth = stack.len();
        if d == 0 {
            out.push(depth);
            while let Some(top) = stack.last_mut() {
                *top -= 1;
                if *top > 0 {
                    break;
                }
                stack.pop();
            }
        } else {
            stack.push(d);
        }
    }
    out
}

/// Vertex depths of a degree word, in preorder.
pub fn depths(word: &[usize]) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for &d in word {
        out.push(stack.len());
        if d == 0 {
            while let Some(top) = stack.last_mut() {
                *top -= 1;
                if *top > 0 {
                    break;
                }
                stack.pop();
            }
        } else {
            stack.push(d);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    // Heap's algorithm
    let mut a: Vec<u32> = (1..=n as u32).collect();
    let mut c = vec![0usize; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn unordered_key(t: &Tree) -> String {
    if t.is_leaf() {
        return match t.label() {
            Some(l) => format!("{l}"),
            None => "x".into(),
        };
    }
    let mut parts: Vec<String> = t.children().iter().map(unordered_key).collect();
    parts.sort();
    format!("({})", parts.join(","))
}

fn label_in_preorder(t: &Tree, labels: &[u32], next: &mut usize) -> Tree {
    if t.is_leaf() {
        let l = labels[*next];
        *next += 1;
        Tree::labeled_leaf(l)
    } else {
        Tree::node(t.children().iter().map(|c| label_in_preorder(c, labels, next)).collect())
    }
}

/// One brute-force member of a family: the tree and the degree word of
/// its shape.
#[derive(Clone, Debug)]
pub struct Member {
    pub tree: Tree,
    pub word: Vec<usize>,
}

impl Member {
    pub fn leaf_heights(&self) -> Vec<usize> {
        leaf_heights(&self.word)
    }

    pub fn sum_leaf_heights(&self) -> usize {
        self.leaf_heights().iter().sum()
    }

    pub fn leaves_at(&self, k: usize) -> usize {
        self.leaf_heights().iter().filter(|&&h| h == k).count()
    }

    pub fn nodes_at(&self, k: usize) -> usize {
        depths(&self.word).iter().filter(|&&h| h == k).count()
    }
}

/// All trees of `f` with `n` leaves. Ordered families come straight from
/// the degree words; labeled ones label each distinct unordered shape in
/// every way and de-duplicate by an unordered key.
pub fn brute_force(f: &Family, n: usize) -> Vec<Member> {
    let words = degree_words(n, f.is_binary());
    if !f.is_labeled() {
        return words.into_iter().map(|w| Member { tree: tree_of(&w), word: w }).collect();
    }
    let mut shapes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for w in words {
        shapes.entry(unordered_key(&tree_of(&w))).or_insert(w);
    }
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for w in shapes.values() {
        let shape = tree_of(w);
        for p in &perms {
            let t = label_in_preorder(&shape, p, &mut 0);
            if seen.insert(unordered_key(&t)) {
                out.push(Member { tree: t, word: w.clone() });
            }
        }
    }
    out
}

/// Key identifying a tree up to the family's notion of equality.
pub fn key(f: &Family, t: &Tree) -> String {
    if f.is_labeled() {
        unordered_key(t)
    } else {
        format!("{:?}", leaf_free_word(t))
    }
}

fn leaf_free_word(t: &Tree) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![t];
    while let Some(v) = stack.pop() {
        out.push(v.degree());
        stack.extend(v.children().iter().rev());
    }
    out
}

/// Counts for sizes `1..=n` by recurrences over compositions (ordered) or
/// over set partitions split at the block containing 1 (labeled). For
/// general trees `F(1) = 1`, `F(m) = 2a(m)` counts forests of at least one
/// tree.
pub fn recurrence_counts(f: &Family, n: usize) -> Vec<BigInt> {
    let mut a = vec![BigInt::from(0), BigInt::from(1)];
    for m in 2..=n {
        let forest = |j: usize| if j == 1 { BigInt::from(1) } else { &a[j] * 2 };
        let total = (1..m)
            .map(|j| {
                let mult = if f.is_labeled() { binom(m - 1, j - 1) } else { BigInt::from(1) };
                let rest = if f.is_binary() { a[m - j].clone() } else { forest(m - j) };
                mult * &a[j] * rest
            })
            .sum();
        a.push(total);
    }
    a.remove(0);
    a
}

pub fn binom(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn mean_of(values: impl Iterator<Item = usize>) -> BigRational {
    let (mut sum, mut count) = (BigInt::from(0), BigInt::from(0));
    for v in values {
        sum += v;
        count += 1;
    }
    BigRational::new(sum, count)
}

/// p-value of Pearson's χ² test of `counts` against equal cell
/// probabilities.
pub fn chi2_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    upper_tail(stat, counts.len() - 1)
}

/// p-value of the two-sample χ² homogeneity test.
pub fn chi2_two_sample(a: &HashMap<String, u64>, b: &HashMap<String, u64>) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let (ka, kb) = ((nb as f64 / na as f64).sqrt(), (na as f64 / nb as f64).sqrt());
    let keys: HashSet<&String> = a.keys().chain(b.keys()).collect();
    let mut stat = 0.0;
    for k in &keys {
        let (x, y) = (*a.get(*k).unwrap_or(&0) as f64, *b.get(*k).unwrap_or(&0) as f64);
        stat += (ka * x - kb * y).powi(2) / (x + y);
    }
    upper_tail(stat, keys.len() - 1)
}

fn upper_tail(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat)
}
