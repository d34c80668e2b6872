//! Dense table serialization.
//!
//! Binary layout (little endian):
//!
//! ```text
//! b"HOMT"  u32 len  domain spec  u32 len  codomain spec  u64 |G|  |G| x u64 values
//! ```
//!
//! Values are packed codomain encodings in canonical domain order.

use super::FunctionTable;
use crate::group::GroupSpec;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"HOMT";

/// Largest domain accepted by the JSON debug form.
pub const JSON_DEBUG_CAP: u128 = 256;

fn dense<'a>(f: &'a FunctionTable) -> Result<&'a [crate::GroupElement]> {
    f.dense_values()
        .ok_or_else(|| Error::Unsupported("only dense tables serialize".into()))
}

pub fn write_binary<W: Write>(f: &FunctionTable, mut w: W) -> Result<()> {
    let values = dense(f)?;
    w.write_all(MAGIC)?;
    for spec in [f.domain().to_string(), f.codomain().to_string()] {
        w.write_all(&(spec.len() as u32).to_le_bytes())?;
        w.write_all(spec.as_bytes())?;
    }
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.bits().to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_spec<R: Read>(r: &mut R) -> Result<GroupSpec> {
    let len = read_u32(r)? as usize;
    if len > 4096 {
        return Err(Error::Domain("group spec string too long".into()));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    let text = String::from_utf8(buf).map_err(|_| Error::Domain("spec is not utf-8".into()))?;
    Ok(text.parse()?)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<FunctionTable> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Domain("not a function table".into()));
    }
    let g = read_spec(&mut r)?;
    let h = read_spec(&mut r)?;
    let n = read_u64(&mut r)?;
    if n as u128 != g.order() {
        return Err(Error::Domain(format!(
            "header says {n} values but |{g}| = {}",
            g.order()
        )));
    }
    g.small_order(super::DENSE_CAP)?;
    let values = (0..n)
        .map(|_| read_u64(&mut r).map(crate::GroupElement::from_bits))
        .collect::<Result<Vec<_>>>()?;
    FunctionTable::dense(&g, &h, values)
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    domain: GroupSpec,
    codomain: GroupSpec,
    values: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certified_distance: Option<String>,
}

pub fn write_json(f: &FunctionTable) -> Result<String> {
    if f.domain().order() > JSON_DEBUG_CAP {
        return Err(Error::ResourceCap(format!(
            "JSON form is limited to {JSON_DEBUG_CAP} domain elements"
        )));
    }
    let h = f.codomain();
    let doc = JsonTable {
        domain: f.domain().clone(),
        codomain: h.clone(),
        values: dense(f)?.iter().map(|v| h.format_element(*v)).collect(),
        certified_distance: f.certified_distance().map(|d| d.to_string()),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn read_json(text: &str) -> Result<FunctionTable> {
    let doc: JsonTable = serde_json::from_str(text)?;
    let values = doc
        .values
        .iter()
        .map(|s| doc.codomain.parse_element(s))
        .collect::<Result<Vec<_>, _>>()?;
    let certified = match doc.certified_distance {
        Some(s) => Some(
            s.parse()
                .map_err(|_| Error::Domain(format!("bad distance `{s}`")))?,
        ),
        None => None,
    };
    Ok(
        FunctionTable::dense(&doc.domain, &doc.codomain, values)?
            .with_certified_distance(certified),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{gen_instance, InstanceKind};
    use crate::Epsilon;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn binary_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g: GroupSpec = "S4".parse().unwrap();
        let h: GroupSpec = "Z3xS3".parse().unwrap();
        let f = gen_instance(&InstanceKind::RandomFunction, &g, &h, &mut rng).unwrap();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 2 + 4 + 5 + 8 + 24 * 8);
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.dense_values(), f.dense_values());
        buf[0] = b'X';
        assert!(read_binary(buf.as_slice()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g: GroupSpec = "Z5".parse().unwrap();
        let kind = InstanceKind::PlantedFar {
            epsilon: Epsilon::new(1, 4).unwrap(),
        };
        let f = gen_instance(&kind, &g, &g, &mut rng).unwrap();
        let text = write_json(&f).unwrap();
        let back = read_json(&text).unwrap();
        assert_eq!(back.dense_values(), f.dense_values());
        assert_eq!(back.certified_distance(), f.certified_distance());
        let big: GroupSpec = "F2^9".parse().unwrap();
        let f = gen_instance(&InstanceKind::RandomFunction, &big, &g, &mut rng).unwrap();
        assert!(write_json(&f).is_err());
    }
}
