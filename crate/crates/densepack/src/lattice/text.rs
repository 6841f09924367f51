use std::fmt::Write;

use super::{EdgeSpec, LatticeSpec, OrderSpec, PackingType, TableEntry};
use crate::{Error, Rational, Result};

pub(super) fn write(spec: &LatticeSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lattice {}", spec.name);
    for b in &spec.basis {
        let _ = writeln!(out, "basis {:?} {:?}", b[0], b[1]);
    }
    for (s, p) in spec.sites.iter().enumerate() {
        let _ = writeln!(out, "site {:?} {:?} {}", p[0], p[1], spec.degrees[s]);
    }
    for e in &spec.edges {
        let _ = writeln!(
            out,
            "edge {} {} {} {} {:?}",
            e.a, e.b, e.offset[0], e.offset[1], e.length
        );
    }
    let _ = writeln!(out, "period {} {}", spec.class_period[0], spec.class_period[1]);
    let _ = writeln!(out, "class {}", join(&spec.class_of));
    let _ = writeln!(out, "optimal {}", join(&spec.optimal));
    for ring in &spec.flips {
        let parts: Vec<String> = ring
            .iter()
            .map(|(s, o)| format!("{} {} {}", s, o[0], o[1]))
            .collect();
        let _ = writeln!(out, "flip {}", parts.join(" "));
    }
    match &spec.order {
        OrderSpec::Spread(cs) => {
            let _ = writeln!(out, "order spread {}", join(cs));
        }
        OrderSpec::Contrast(pairs) => {
            let parts: Vec<String> = pairs
                .iter()
                .map(|(l, r)| format!("{}/{}", join_with(l, ","), join_with(r, ",")))
                .collect();
            let _ = writeln!(out, "order contrast {}", parts.join(" "));
        }
    }
    let t = &spec.table;
    let _ = writeln!(out, "density {} {}", t.density.numer(), t.density.denom());
    let _ = writeln!(out, "type {}", t.packing_type.as_str());
    if let Some(pc) = t.pc {
        match t.rho_pc {
            Some(rho) => {
                let _ = writeln!(out, "critical {:?} {:?}", pc, rho);
            }
            None => {
                let _ = writeln!(out, "critical {:?}", pc);
            }
        }
    }
    out
}

fn join(xs: &[usize]) -> String {
    join_with(xs, " ")
}

fn join_with(xs: &[usize], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

struct Fields<'a> {
    line: usize,
    it: std::str::SplitWhitespace<'a>,
}

impl<'a> Fields<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_str(&mut self) -> Result<&'a str> {
        let line = self.line;
        self.it.next().ok_or(Error::Parse {
            line,
            msg: "missing field".into(),
        })
    }

    fn next<T: std::str::FromStr>(&mut self) -> Result<T> {
        let s = self.next_str()?;
        s.parse().map_err(|_| self.err(format!("bad value `{s}`")))
    }

    fn rest<T: std::str::FromStr>(&mut self) -> Result<Vec<T>> {
        let mut v = Vec::new();
        for s in self.it.by_ref() {
            v.push(s.parse().map_err(|_| Error::Parse {
                line: self.line,
                msg: format!("bad value `{s}`"),
            })?);
        }
        Ok(v)
    }

    fn done(&mut self) -> Result<()> {
        match self.it.next() {
            None => Ok(()),
            Some(s) => Err(self.err(format!("unexpected `{s}`"))),
        }
    }
}

pub(super) fn read(src: &str) -> Result<LatticeSpec> {
    let mut name = None;
    let mut basis = Vec::new();
    let mut sites = Vec::new();
    let mut degrees = Vec::new();
    let mut edges = Vec::new();
    let mut period = None;
    let mut class_of = None;
    let mut optimal = None;
    let mut flips = Vec::new();
    let mut order = None;
    let mut density = None;
    let mut packing_type = None;
    let mut critical = None;

    for (i, raw) in src.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut f = Fields {
            line: i + 1,
            it: body.split_whitespace(),
        };
        let tag = f.next_str()?;
        if name.is_none() && tag != "lattice" {
            return Err(f.err("expected `lattice <name>` header"));
        }
        match tag {
            "lattice" => {
                if name.is_some() {
                    return Err(f.err("duplicate header"));
                }
                name = Some(f.next_str()?.to_string());
            }
            "basis" => {
                basis.push([f.next()?, f.next()?]);
            }
            "site" => {
                sites.push([f.next()?, f.next()?]);
                degrees.push(f.next()?);
            }
            "edge" => {
                edges.push(EdgeSpec {
                    a: f.next()?,
                    b: f.next()?,
                    offset: [f.next()?, f.next()?],
                    length: f.next()?,
                });
            }
            "period" => period = Some([f.next()?, f.next()?]),
            "class" => class_of = Some(f.rest()?),
            "optimal" => optimal = Some(f.rest()?),
            "flip" => {
                let nums: Vec<i64> = f.rest()?;
                if nums.len() % 3 != 0 || nums.is_empty() {
                    return Err(f.err("flip needs site/offset triples"));
                }
                let ring = nums
                    .chunks(3)
                    .map(|c| (c[0] as usize, [c[1] as i32, c[2] as i32]))
                    .collect();
                flips.push(ring);
            }
            "order" => {
                let kind = f.next_str()?;
                order = Some(match kind {
                    "spread" => OrderSpec::Spread(f.rest()?),
                    "contrast" => {
                        let mut pairs = Vec::new();
                        for tok in f.it.by_ref() {
                            let (l, r) = tok.split_once('/').ok_or(Error::Parse {
                                line: i + 1,
                                msg: format!("bad contrast `{tok}`"),
                            })?;
                            pairs.push((parse_list(l, i + 1)?, parse_list(r, i + 1)?));
                        }
                        OrderSpec::Contrast(pairs)
                    }
                    other => return Err(f.err(format!("unknown order kind `{other}`"))),
                });
            }
            "density" => {
                let n: i64 = f.next()?;
                let d: i64 = f.next()?;
                if d == 0 {
                    return Err(f.err("zero denominator"));
                }
                density = Some(Rational::new(n, d));
            }
            "type" => {
                let s = f.next_str()?;
                packing_type =
                    Some(PackingType::parse(s).ok_or(f.err(format!("unknown type `{s}`")))?);
            }
            "critical" => {
                let v: Vec<f64> = f.rest()?;
                if v.is_empty() || v.len() > 2 {
                    return Err(f.err("critical takes pc and optional density"));
                }
                critical = Some((v[0], v.get(1).copied()));
            }
            other => return Err(f.err(format!("unknown record `{other}`"))),
        }
        f.done()?;
    }

    let missing = |what: &str| Error::InvalidSpec(format!("missing `{what}` record"));
    if basis.len() != 2 {
        return Err(Error::InvalidSpec("need exactly two basis records".into()));
    }
    let spec = LatticeSpec {
        name: name.ok_or(missing("lattice"))?,
        basis: [basis[0], basis[1]],
        sites,
        degrees,
        edges,
        class_period: period.ok_or(missing("period"))?,
        class_of: class_of.ok_or(missing("class"))?,
        optimal: optimal.ok_or(missing("optimal"))?,
        flips,
        order: order.ok_or(missing("order"))?,
        table: TableEntry {
            density: density.ok_or(missing("density"))?,
            packing_type: packing_type.ok_or(missing("type"))?,
            pc: critical.map(|c| c.0),
            rho_pc: critical.and_then(|c| c.1),
        },
    };
    Ok(spec)
}

fn parse_list(s: &str, line: usize) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad class `{t}`"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;

    #[test]
    fn catalog_round_trips() {
        for spec in catalog() {
            let text = write(spec);
            let back = read(&text).unwrap();
            assert_eq!(&back, spec, "{}", spec.name);
            assert_eq!(write(&back), text);
        }
    }

    #[test]
    fn header_required() {
        let err = read("basis 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn unknown_record_rejected() {
        let err = read("lattice x\nfoo 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
