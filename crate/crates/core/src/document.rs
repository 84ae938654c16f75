//! JSON documents for Lie series, expansions and automorphisms.
//!
//! Coefficients are exact rational strings (`"3"`, `"-1/2"`); words are lists
//! of generator names. Lie words are Lyndon words, their bracketing being the
//! standard factorization. Parse errors name the offending field path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::automorphism::LieAutomorphism;
use crate::error::{Error, Result};
use crate::free_lie::{is_lyndon, letter_name, Gen, LieSeries, Word};
use crate::linalg::{format_q, parse_q, Q};
use crate::tensor::{ExpansionMap, TensorSeries};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    coeff: String,
    word: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesDoc {
    genus: usize,
    max_degree: usize,
    terms: Vec<TermDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    genus: usize,
    max_degree: usize,
    images: BTreeMap<String, Vec<TermDoc>>,
}

fn term_docs<'a>(terms: impl IntoIterator<Item = (&'a Word, &'a Q)>) -> Vec<TermDoc> {
    terms
        .into_iter()
        .map(|(w, c)| TermDoc {
            coeff: format_q(c),
            word: w.iter().map(|&l| letter_name(l)).collect(),
        })
        .collect()
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse("document", e.to_string()))
}

fn check_header(genus: usize, max_degree: usize) -> Result<()> {
    if genus == 0 {
        return Err(Error::parse("genus", "genus must be at least 1"));
    }
    if max_degree == 0 {
        return Err(Error::parse("max_degree", "max_degree must be at least 1"));
    }
    Ok(())
}

/// Parses a term list; `lie` demands nonempty Lyndon words.
fn parse_terms(terms: &[TermDoc], genus: usize, max_degree: usize, path: &str, lie: bool) -> Result<Vec<(Word, Q)>> {
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let here = format!("{path}[{i}]");
            let c = parse_q(&t.coeff)
                .ok_or_else(|| Error::parse(format!("{here}.coeff"), format!("`{}` is not a rational number", t.coeff)))?;
            let word = t
                .word
                .iter()
                .enumerate()
                .map(|(j, name)| {
                    let field = format!("{here}.word[{j}]");
                    let g = Gen::parse(name).ok_or_else(|| Error::parse(&field, format!("unknown generator `{name}`")))?;
                    if g.index > genus {
                        return Err(Error::parse(&field, format!("generator `{name}` outside genus {genus}")));
                    }
                    Ok(g.letter())
                })
                .collect::<Result<Word>>()?;
            if word.len() > max_degree {
                return Err(Error::parse(format!("{here}.word"), format!("word longer than max_degree {max_degree}")));
            }
            if lie && (word.is_empty() || !is_lyndon(&word)) {
                return Err(Error::parse(format!("{here}.word"), "not a Lyndon word"));
            }
            Ok((word, c))
        })
        .collect()
}

/// Per-generator term lists, in letter order, checking the key set.
fn parse_images(doc: &MapDoc) -> Result<Vec<(String, &[TermDoc])>> {
    let names: Vec<String> = Gen::all(doc.genus).into_iter().map(|g| g.name()).collect();
    if let Some(extra) = doc.images.keys().find(|k| !names.contains(k)) {
        return Err(Error::parse(format!("images.{extra}"), format!("not a generator of genus {}", doc.genus)));
    }
    names
        .into_iter()
        .map(|n| {
            let terms = doc
                .images
                .get(&n)
                .ok_or_else(|| Error::parse(format!("images.{n}"), "missing generator image"))?;
            Ok((n, terms.as_slice()))
        })
        .collect()
}

pub fn lie_series_to_json(x: &LieSeries) -> String {
    let doc = SeriesDoc {
        genus: x.genus(),
        max_degree: x.max_degree(),
        terms: term_docs(x.sorted_terms()),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn lie_series_from_json(text: &str) -> Result<LieSeries> {
    let doc: SeriesDoc = parse_json(text)?;
    check_header(doc.genus, doc.max_degree)?;
    let terms = parse_terms(&doc.terms, doc.genus, doc.max_degree, "terms", true)?;
    LieSeries::from_terms(doc.genus, doc.max_degree, terms)
}

pub fn expansion_to_json(theta: &ExpansionMap) -> String {
    let images = Gen::all(theta.genus())
        .into_iter()
        .zip(theta.images())
        .map(|(g, img)| (g.name(), term_docs(img.sorted_terms())))
        .collect();
    let doc = MapDoc {
        genus: theta.genus(),
        max_degree: theta.max_degree(),
        images,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn expansion_from_json(text: &str) -> Result<ExpansionMap> {
    let doc: MapDoc = parse_json(text)?;
    check_header(doc.genus, doc.max_degree)?;
    let images = parse_images(&doc)?
        .into_iter()
        .map(|(name, terms)| {
            let path = format!("images.{name}");
            let terms = parse_terms(terms, doc.genus, doc.max_degree, &path, false)?;
            TensorSeries::from_terms(doc.genus, doc.max_degree, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    ExpansionMap::new(doc.genus, doc.max_degree, images)
}

pub fn automorphism_to_json(psi: &LieAutomorphism) -> String {
    let images = Gen::all(psi.genus())
        .into_iter()
        .zip(psi.images())
        .map(|(g, img)| (g.name(), term_docs(img.sorted_terms())))
        .collect();
    let doc = MapDoc {
        genus: psi.genus(),
        max_degree: psi.max_degree(),
        images,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn automorphism_from_json(text: &str) -> Result<LieAutomorphism> {
    let doc: MapDoc = parse_json(text)?;
    check_header(doc.genus, doc.max_degree)?;
    let mut images = Vec::with_capacity(2 * doc.genus);
    for (l, (name, terms)) in parse_images(&doc)?.into_iter().enumerate() {
        let path = format!("images.{name}");
        let terms = parse_terms(terms, doc.genus, doc.max_degree, &path, true)?;
        let img = LieSeries::from_terms(doc.genus, doc.max_degree, terms)?;
        if img.degree_part(1) != LieSeries::letter(doc.genus, doc.max_degree, l as u8) {
            return Err(Error::parse(path, format!("degree-1 part must be exactly {name}")));
        }
        images.push(img);
    }
    LieAutomorphism::new(doc.genus, doc.max_degree, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::johnson::random_ic_element;
    use crate::symplectic::paper_example_expansion;
    use crate::tensor::magnus_expansion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field_of(e: Error) -> String {
        match e {
            Error::Parse { field, .. } => field,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn lie_series_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = LieSeries::random(&mut rng, 2, 5, 1, 5, 8);
        assert_eq!(lie_series_from_json(&lie_series_to_json(&x)).unwrap(), x);
    }

    #[test]
    fn expansion_round_trip() {
        for theta in [paper_example_expansion(2).unwrap(), magnus_expansion(2, 4)] {
            assert_eq!(expansion_from_json(&expansion_to_json(&theta)).unwrap(), theta);
        }
    }

    #[test]
    fn automorphism_round_trip() {
        let psi = random_ic_element(2, 1, 3, 4).unwrap();
        assert_eq!(automorphism_from_json(&automorphism_to_json(&psi)).unwrap(), psi);
    }

    #[test]
    fn errors_name_fields() {
        let bad_coeff = r#"{"genus":1,"max_degree":2,"terms":[{"coeff":"x","word":["a1"]}]}"#;
        assert_eq!(field_of(lie_series_from_json(bad_coeff).unwrap_err()), "terms[0].coeff");
        let bad_gen = r#"{"genus":1,"max_degree":2,"terms":[{"coeff":"1","word":["a1","b2"]}]}"#;
        assert_eq!(field_of(lie_series_from_json(bad_gen).unwrap_err()), "terms[0].word[1]");
        let not_lyndon = r#"{"genus":1,"max_degree":2,"terms":[{"coeff":"1","word":["b1","a1"]}]}"#;
        assert_eq!(field_of(lie_series_from_json(not_lyndon).unwrap_err()), "terms[0].word");
        let missing = r#"{"genus":1,"max_degree":2,"images":{"a1":[{"coeff":"1","word":["a1"]}]}}"#;
        assert_eq!(field_of(expansion_from_json(missing).unwrap_err()), "images.b1");
        let no_genus = r#"{"max_degree":2,"terms":[]}"#;
        let e = lie_series_from_json(no_genus).unwrap_err();
        assert!(e.to_string().contains("genus"));
        let not_graded_id = r#"{"genus":1,"max_degree":2,"images":{"a1":[{"coeff":"2","word":["a1"]}],"b1":[{"coeff":"1","word":["b1"]}]}}"#;
        assert_eq!(field_of(automorphism_from_json(not_graded_id).unwrap_err()), "images.a1");
    }
}
