//! Reading and writing distance matrices (CSV) and trees (JSON).
//!
//! A CSV file is a square matrix. When its first cell does not parse as a
//! number, the first row and first column hold labels. A JSON document is a
//! tree of nodes `{"representative", "diameter", "children"}`; leaves may
//! carry a `"birth"`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::FiniteSpace;
use crate::tree::{NestedTree, UMTree};

/// Parsed contents of an input file.
#[derive(Clone, Debug)]
pub enum InputDocument {
    Matrix { rows: Vec<Vec<Scalar>>, labels: Option<Vec<String>> },
    Tree(UMTree),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct JsonNode {
    representative: String,
    diameter: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<JsonNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    birth: Option<String>,
}

fn scalar(text: &str) -> Result<Scalar> {
    text.parse().map_err(|_| Error::Parse(format!("not a number: {text:?}")))
}

pub fn parse_csv(text: &str) -> Result<InputDocument> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for r in reader.records() {
        let r = r.map_err(|e| Error::Parse(e.to_string()))?;
        if r.iter().all(|c| c.is_empty()) {
            continue;
        }
        records.push(r.iter().map(str::to_string).collect::<Vec<_>>());
    }
    let Some(first) = records.first() else {
        return Err(Error::EmptySpace);
    };
    if first[0].parse::<Scalar>().is_ok() {
        let rows = records.iter().map(|r| r.iter().map(|c| scalar(c)).collect()).collect::<Result<_>>()?;
        return Ok(InputDocument::Matrix { rows, labels: None });
    }
    // A header as wide as the data rows with numeric rows below: labels on
    // the first row only.
    let body = &records[1..];
    if body.iter().all(|r| r.len() == first.len() && r[0].parse::<Scalar>().is_ok()) {
        let rows = body.iter().map(|r| r.iter().map(|c| scalar(c)).collect()).collect::<Result<_>>()?;
        return Ok(InputDocument::Matrix { rows, labels: Some(first.clone()) });
    }
    let labels: Vec<String> = first[1..].to_vec();
    let mut rows = Vec::with_capacity(records.len() - 1);
    for (k, r) in records[1..].iter().enumerate() {
        if let Some(expected) = labels.get(k) {
            if &r[0] != expected {
                return Err(Error::Parse(format!("row label {:?} does not match column label {expected:?}", r[0])));
            }
        }
        rows.push(r[1..].iter().map(|c| scalar(c)).collect::<Result<Vec<_>>>()?);
    }
    Ok(InputDocument::Matrix { rows, labels: Some(labels) })
}

fn nested_from_json(node: &JsonNode) -> Result<NestedTree> {
    if node.children.is_empty() {
        let birth = match &node.birth {
            Some(b) => scalar(b)?,
            None => scalar(&node.diameter)?,
        };
        return Ok(NestedTree::Leaf { label: node.representative.clone(), birth });
    }
    let children = node.children.iter().map(nested_from_json).collect::<Result<Vec<_>>>()?;
    Ok(NestedTree::Node { diameter: scalar(&node.diameter)?, children })
}

pub fn parse_tree_json(text: &str) -> Result<UMTree> {
    let root: JsonNode = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    UMTree::from_nested(&nested_from_json(&root)?)
}

fn json_node(tree: &UMTree, v: usize, births: bool) -> JsonNode {
    let node = tree.node(v);
    let leaf = node.children.is_empty();
    JsonNode {
        representative: tree.representative_label(v).to_string(),
        diameter: if leaf { "0".to_string() } else { node.diameter.to_string() },
        children: node.children.iter().map(|&c| json_node(tree, c, births)).collect(),
        birth: (leaf && births).then(|| node.diameter.to_string()),
    }
}

/// JSON document of a tree; leaves get a `"birth"` only for treegrams.
pub fn tree_to_json(tree: &UMTree) -> serde_json::Value {
    serde_json::to_value(json_node(tree, tree.root(), tree.has_births())).expect("tree nodes serialize")
}

/// Read a CSV matrix, or a JSON tree when the extension is `.json`.
pub fn read_input(path: &Path) -> Result<InputDocument> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        Ok(InputDocument::Tree(parse_tree_json(&text)?))
    } else {
        parse_csv(&text)
    }
}

/// Labelled CSV rendering of a matrix.
pub fn matrix_to_csv<S: FiniteSpace + ?Sized>(space: &S) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("").chain(space.labels().iter().map(String::as_str)).collect();
    w.write_record(&header).expect("writing to memory");
    for (i, row) in space.to_rows().iter().enumerate() {
        let cells: Vec<String> =
            std::iter::once(space.label(i).to_string()).chain(row.iter().map(|v| v.to_string())).collect();
        w.write_record(&cells).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{UltraDissimilaritySpace, UltrametricSpace};

    #[test]
    fn csv_with_and_without_labels() {
        let InputDocument::Matrix { rows, labels } = parse_csv("0,1,2\n1,0,2\n2,2,0\n").unwrap() else {
            panic!("expected a matrix")
        };
        assert_eq!(labels, None);
        assert_eq!(rows[0][2], Scalar::from_integer(2));
        let InputDocument::Matrix { rows, labels } = parse_csv(",a,b\na,0,0.5\nb,1/2,0\n").unwrap() else {
            panic!("expected a matrix")
        };
        assert_eq!(labels.unwrap(), ["a", "b"]);
        assert_eq!(rows[1][0], Scalar::ratio(1, 2));
        assert_eq!(rows[0][1], Scalar::ratio(1, 2));
        let InputDocument::Matrix { rows, labels } = parse_csv("a,b\n0,3\n3,0\n").unwrap() else {
            panic!("expected a matrix")
        };
        assert_eq!(labels.unwrap(), ["a", "b"]);
        assert_eq!(rows[0][1], Scalar::from_integer(3));
        assert!(matches!(parse_csv(",a,b\nb,0,1\na,1,0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_csv("0,x\n1,0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_csv(""), Err(Error::EmptySpace)));
    }

    #[test]
    fn csv_round_trip() {
        let x = UltrametricSpace::from_integers(&[vec![0, 1], vec![1, 0]], Some(&["a", "b"])).unwrap();
        let text = matrix_to_csv(&x);
        assert_eq!(text, ",a,b\na,0,1\nb,1,0\n");
        let InputDocument::Matrix { rows, labels } = parse_csv(&text).unwrap() else { panic!() };
        assert_eq!(UltrametricSpace::new(rows, labels).unwrap(), x);
    }

    fn same_by_label<S: FiniteSpace>(a: &S, b: &S) -> bool {
        a.len() == b.len()
            && a.labels().iter().all(|l| b.index_of(l).is_some())
            && (0..a.len()).all(|i| {
                (0..a.len()).all(|j| {
                    let (bi, bj) = (b.index_of(a.label(i)).unwrap(), b.index_of(a.label(j)).unwrap());
                    a.dist(i, j) == b.dist(bi, bj)
                })
            })
    }

    #[test]
    fn json_trees() {
        let text = r#"{"representative":"a","diameter":"3","children":[
            {"representative":"a","diameter":"1","children":[
                {"representative":"a","diameter":"0"},{"representative":"b","diameter":"0"}]},
            {"representative":"c","diameter":"0"}]}"#;
        let t = parse_tree_json(text).unwrap();
        let m = t.to_matrix();
        assert_eq!(m.dist(m.index_of("a").unwrap(), m.index_of("c").unwrap()), &Scalar::from_integer(3));
        let back = parse_tree_json(&tree_to_json(&t).to_string()).unwrap();
        assert!(same_by_label(&back.to_matrix(), &m));
        assert!(tree_to_json(&t).to_string().find("birth").is_none());

        let x = UltraDissimilaritySpace::from_integers(&[vec![1, 2], vec![2, 0]], Some(&["p", "q"])).unwrap();
        let t = UMTree::from_dissimilarity(&x);
        let json = tree_to_json(&t);
        assert!(json.to_string().contains("\"birth\":\"1\""));
        assert!(same_by_label(&parse_tree_json(&json.to_string()).unwrap().to_dissimilarity(), &x));
        assert!(matches!(parse_tree_json("{"), Err(Error::Parse(_))));
        let single = r#"{"representative":"a","diameter":"1","children":[{"representative":"a","diameter":"0"}]}"#;
        assert!(matches!(parse_tree_json(single), Err(Error::InvalidTree(_))));
    }
}
