//! Line-oriented instance files.
//!
//! ```text
//! c optional comments
//! p selcol <n> <m> <P>
//! e <u> <v>            one per edge, 1-based
//! k <p> <v1> ... <vr>  one per cluster, p = 1..P
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, VertexSet};
use crate::instance::SelColInstance;

struct Header {
    n: usize,
    m: usize,
    p: usize,
    line: usize,
}

fn parse_num(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("{what} `{tok}` is not a nonnegative integer")))
}

/// 1-based vertex id to 0-based index.
fn parse_vertex(tok: Option<&str>, line: usize, n: usize) -> Result<usize> {
    let v = parse_num(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(Error::parse(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

pub fn parse_instance(text: &str) -> Result<SelColInstance> {
    let mut header: Option<Header> = None;
    let mut builder: Option<GraphBuilder> = None;
    let mut edges = 0;
    let mut cluster_of: Vec<Option<usize>> = Vec::new();
    let mut clusters: Vec<Option<Vec<usize>>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        match kind {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(Error::parse(line, "second problem line"));
                }
                if toks.next() != Some("selcol") {
                    return Err(Error::parse(line, "expected `p selcol <n> <m> <P>`"));
                }
                let n = parse_num(toks.next(), line, "vertex count")?;
                let m = parse_num(toks.next(), line, "edge count")?;
                let p = parse_num(toks.next(), line, "cluster count")?;
                if n == 0 || p == 0 {
                    return Err(Error::parse(line, "instances need at least one vertex and one cluster"));
                }
                builder = Some(GraphBuilder::new(n));
                cluster_of = vec![None; n];
                clusters = vec![None; p];
                header = Some(Header { n, m, p, line });
            }
            "e" | "k" => {
                let h = header
                    .as_ref()
                    .ok_or_else(|| Error::parse(line, "data line before the problem line"))?;
                if kind == "e" {
                    let u = parse_vertex(toks.next(), line, h.n)?;
                    let v = parse_vertex(toks.next(), line, h.n)?;
                    if u == v {
                        return Err(Error::parse(line, format!("self-loop on vertex {}", u + 1)));
                    }
                    let b = builder.as_mut().expect("set with header");
                    if !b.add_edge(u, v)? {
                        return Err(Error::parse(line, format!("duplicate edge {} {}", u + 1, v + 1)));
                    }
                    edges += 1;
                } else {
                    let p = parse_num(toks.next(), line, "cluster index")?;
                    if p == 0 || p > h.p {
                        return Err(Error::parse(line, format!("cluster {p} outside 1..={}", h.p)));
                    }
                    if clusters[p - 1].is_some() {
                        return Err(Error::parse(line, format!("cluster {p} listed twice")));
                    }
                    let mut members = Vec::new();
                    for tok in toks.by_ref() {
                        let v = parse_vertex(Some(tok), line, h.n)?;
                        if let Some(q) = cluster_of[v] {
                            return Err(Error::parse(
                                line,
                                format!("vertex {} already in cluster {}", v + 1, q + 1),
                            ));
                        }
                        cluster_of[v] = Some(p - 1);
                        members.push(v);
                    }
                    if members.is_empty() {
                        return Err(Error::parse(line, format!("cluster {p} is empty")));
                    }
                    clusters[p - 1] = Some(members);
                }
                if let Some(extra) = toks.next() {
                    return Err(Error::parse(line, format!("unexpected token `{extra}`")));
                }
            }
            other => return Err(Error::parse(line, format!("unknown line type `{other}`"))),
        }
    }

    let h = header.ok_or(Error::Parse {
        line: None,
        message: "missing problem line".into(),
    })?;
    if edges != h.m {
        return Err(Error::parse(h.line, format!("header declares {} edges, found {edges}", h.m)));
    }
    if let Some(p) = clusters.iter().position(Option::is_none) {
        return Err(Error::parse(h.line, format!("cluster {} missing", p + 1)));
    }
    if let Some(v) = cluster_of.iter().position(Option::is_none) {
        return Err(Error::parse(h.line, format!("vertex {} unassigned", v + 1)));
    }
    let clusters = clusters.into_iter().map(|c| VertexSet::new(c.expect("checked"))).collect();
    SelColInstance::new(builder.expect("set with header").build(), clusters)
}

/// Canonical text: edges sorted with `u < v`, cluster members ascending.
pub fn write_instance(inst: &SelColInstance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    writeln!(out, "p selcol {} {} {}", g.n(), g.m(), inst.num_clusters()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    for (p, cluster) in inst.clusters.iter().enumerate() {
        write!(out, "k {}", p + 1).unwrap();
        for v in cluster.iter() {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_instance_file(path: impl AsRef<Path>) -> Result<SelColInstance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance_file(path: impl AsRef<Path>, inst: &SelColInstance) -> Result<()> {
    std::fs::write(path, write_instance(inst))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn err_text(text: &str) -> String {
        parse_instance(text).unwrap_err().to_string()
    }

    #[test]
    fn minimal_file() {
        let inst = parse_instance("c tiny\np selcol 2 1 2\ne 1 2\nk 1 1\nk 2 2\n").unwrap();
        assert_eq!(inst.graph, Graph::complete(2));
        assert_eq!(inst.num_clusters(), 2);
    }

    #[test]
    fn cube_counts() {
        let text = write_instance(&SelColInstance::cube_example());
        assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 12);
        assert_eq!(text.lines().filter(|l| l.starts_with("k ")).count(), 4);
        let back = parse_instance(&text).unwrap();
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn edgeless_file_has_no_edge_lines() {
        let text = write_instance(&SelColInstance::singletons(Graph::empty(3)));
        assert_eq!(text, "p selcol 3 0 3\nk 1 1\nk 2 2\nk 3 3\n");
    }

    #[test]
    fn reversed_edges_are_accepted() {
        let inst = parse_instance("p selcol 2 1 1\ne 2 1\nk 1 1 2\n").unwrap();
        assert!(inst.graph.has_edge(0, 1));
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(err_text("p selcol 5 0 1\nk 1 1 2 3 4\n"), "line 1: vertex 5 unassigned");
        assert_eq!(
            err_text("p selcol 2 2 1\ne 1 2\ne 2 1\nk 1 1 2\n"),
            "line 3: duplicate edge 2 1"
        );
        assert_eq!(err_text("p selcol 2 1 1\ne 2 2\nk 1 1 2\n"), "line 2: self-loop on vertex 2");
        assert_eq!(
            err_text("p selcol 2 0 2\nk 1 1 2\nk 2 2\n"),
            "line 3: vertex 2 already in cluster 1"
        );
        assert_eq!(
            err_text("p selcol 2 3 1\ne 1 2\nk 1 1 2\n"),
            "line 1: header declares 3 edges, found 1"
        );
        assert_eq!(err_text("p selcol 2 0 2\nk 1 1 2\n"), "line 1: cluster 2 missing");
        assert!(err_text("e 1 2\n").starts_with("line 1"));
        assert!(err_text("p selcol 2 0 1\nk 1 1 3\n").starts_with("line 2"));
        assert!(err_text("p selcol 2 0 1\nx\n").starts_with("line 2"));
        assert_eq!(err_text(""), "missing problem line");
    }
}
