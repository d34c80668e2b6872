//! Compact text forms for group specs (`Z6`, `F2^16`, `S5`, `D4`, `Z3xS3`) and
//! their elements (`3`, `(1,0,1)`, `[2,0,1]`, `r2s`, `{1|[1,0,2]}`).

use super::{GroupElement, GroupError, GroupKind, GroupSpec};
use std::str::FromStr;

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = |why: &str| GroupError::Parse(s.to_string(), why.to_string());
        let parts: Vec<&str> = s.split('x').collect();
        if parts.len() > 1 {
            let factors = parts
                .iter()
                .map(|p| parse_atom(p.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            return GroupSpec::product(factors);
        }
        if s.is_empty() {
            return Err(err("empty"));
        }
        parse_atom(s)
    }
}

fn parse_atom(s: &str) -> Result<GroupSpec, GroupError> {
    let err = |why: &str| GroupError::Parse(s.to_string(), why.to_string());
    let num = |t: &str| {
        t.parse::<u64>()
            .map_err(|_| err("expected a positive integer"))
    };
    let mut chars = s.chars();
    let head = chars.next().ok_or_else(|| err("empty"))?;
    let rest = chars.as_str();
    match head {
        'Z' => GroupSpec::cyclic(num(rest)?),
        'S' => GroupSpec::symmetric(u32::try_from(num(rest)?).map_err(|_| err("degree"))?),
        'D' => GroupSpec::dihedral(num(rest)?),
        'F' => {
            let (p, n) = match rest.split_once('^') {
                Some((p, n)) => (num(p)?, num(n)?),
                None => (num(rest)?, 1),
            };
            GroupSpec::vector_space(p, u32::try_from(n).map_err(|_| err("dimension"))?)
        }
        _ => Err(err("unknown group kind")),
    }
}

impl GroupSpec {
    pub fn format_element(&self, x: GroupElement) -> String {
        match &self.kind {
            GroupKind::Cyclic(_) => x.bits().to_string(),
            GroupKind::VectorSpace { .. } => {
                let d = self.digits(x).unwrap_or_default();
                let body: Vec<String> = d.iter().map(u64::to_string).collect();
                format!("({})", body.join(","))
            }
            GroupKind::Symmetric(_) => {
                let w = self.permutation_word(x).unwrap_or_default();
                let body: Vec<String> = w.iter().map(u32::to_string).collect();
                format!("[{}]", body.join(","))
            }
            GroupKind::Dihedral(_) => {
                let rw = self.width - 1;
                let r = x.bits() & super::field_mask(rw);
                if x.bits() >> rw == 1 {
                    format!("r{r}s")
                } else {
                    format!("r{r}")
                }
            }
            GroupKind::Product(fs) => {
                let comps = self.components(x).unwrap_or_default();
                let body: Vec<String> = fs
                    .iter()
                    .zip(comps)
                    .map(|(f, c)| f.format_element(c))
                    .collect();
                format!("{{{}}}", body.join("|"))
            }
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<GroupElement, GroupError> {
        let s = s.trim();
        let err = |why: &str| GroupError::Parse(s.to_string(), why.to_string());
        let list = |open: char, close: char| -> Result<Vec<u64>, GroupError> {
            let inner = s
                .strip_prefix(open)
                .and_then(|t| t.strip_suffix(close))
                .ok_or_else(|| err("bad brackets"))?;
            if inner.trim().is_empty() {
                return Ok(Vec::new());
            }
            inner
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| err("bad entry")))
                .collect()
        };
        match &self.kind {
            GroupKind::Cyclic(_) => self.residue(s.parse().map_err(|_| err("bad residue"))?),
            GroupKind::VectorSpace { .. } => self.vector(&list('(', ')')?),
            GroupKind::Symmetric(_) => {
                let w: Vec<u32> = list('[', ']')?.into_iter().map(|v| v as u32).collect();
                self.permutation(&w)
            }
            GroupKind::Dihedral(_) => {
                let body = s.strip_prefix('r').ok_or_else(|| err("expected r<k>[s]"))?;
                let (num, refl) = match body.strip_suffix('s') {
                    Some(n) => (n, true),
                    None => (body, false),
                };
                self.dihedral_element(num.parse().map_err(|_| err("bad rotation"))?, refl)
            }
            GroupKind::Product(fs) => {
                let inner = s
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(|| err("bad braces"))?;
                let pieces = split_top_level(inner);
                if pieces.len() != fs.len() {
                    return Err(err("wrong number of components"));
                }
                let parts = fs
                    .iter()
                    .zip(pieces)
                    .map(|(f, p)| f.parse_element(p))
                    .collect::<Result<Vec<_>, _>>()?;
                self.tuple(&parts)
            }
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            '|' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_strings_round_trip() {
        for s in ["Z6", "F2^16", "S5", "D4", "Z3xS3", "F3^4xZ2", "Z1"] {
            let g: GroupSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("F5".parse::<GroupSpec>().unwrap().to_string(), "F5^1");
        for bad in ["", "Q8", "Z", "F4^2", "Zx", "S40"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn element_text_round_trips() {
        for s in ["Z6", "F3^3", "S4", "D5", "Z3xS3", "F2^2xD3"] {
            let g: GroupSpec = s.parse().unwrap();
            for x in g.elements(1000).unwrap() {
                let text = g.format_element(x);
                assert_eq!(g.parse_element(&text).unwrap(), x, "{s}: {text}");
            }
        }
        let s3: GroupSpec = "S3".parse().unwrap();
        assert!(s3.parse_element("[0,0,1]").is_err());
        let d4: GroupSpec = "D4".parse().unwrap();
        assert_eq!(
            d4.format_element(d4.dihedral_element(3, true).unwrap()),
            "r3s"
        );
    }
}
