//! RMDL v1 model files.
//!
//! A UTF-8 header of `key:value` lines ended by an empty line, then every
//! parameter as little-endian binary32 in [`Tensor::ALL`] order:
//! layer-1 weights (input then hidden), layer-1 biases (input then hidden
//! side), the same four tensors for layer 2, head weights
//! (`classes x hidden`, row-major), head bias. Gate blocks inside each LSTM
//! tensor are ordered input, forget, cell candidate, output.
//!
//! [`Tensor::ALL`]: super::Tensor::ALL

use std::fs;
use std::path::Path;

use super::network::{Network, Shape};
use crate::error::{format_err, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub net: Network<f32>,
    pub class_names: Vec<String>,
    pub provenance: String,
}

impl Model {
    pub fn new(
        net: Network<f32>,
        class_names: Vec<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if class_names.len() != net.shape().classes {
            return Err(format_err(format!(
                "{} class names for a {}-class network",
                class_names.len(),
                net.shape().classes
            )));
        }
        Ok(Model {
            net,
            class_names,
            provenance: provenance.into(),
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let shape = self.net.shape();
        if let Some(bad) = self
            .class_names
            .iter()
            .find(|n| n.contains([',', '\n', '\r']) || n.is_empty())
        {
            return Err(format_err(format!(
                "class name {bad:?} cannot be stored in RMDL"
            )));
        }
        let provenance: String = self
            .provenance
            .chars()
            .map(|c| if c == '\n' || c == '\r' { ' ' } else { c })
            .collect();
        let header = format!(
            "format:RMDL\nversion:1\nhidden:{}\nlayers:2\nclasses:{}\ninput_dim:{}\nparam_count:{}\n\
             class_names:{}\nprovenance:{}\n\n",
            shape.hidden,
            shape.classes,
            shape.input_dim,
            shape.param_count(),
            self.class_names.join(","),
            provenance
        );
        let mut out = header.into_bytes();
        out.reserve(self.net.params().len() * 4);
        for p in self.net.params() {
            out.extend_from_slice(&p.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let end = data
            .windows(2)
            .position(|w| w == b"\n\n")
            .ok_or_else(|| format_err("RMDL header is not terminated by a blank line"))?;
        let header = std::str::from_utf8(&data[..end])
            .map_err(|e| format_err(format!("RMDL header is not UTF-8: {e}")))?;
        let body = &data[end + 2..];
        let mut fields = std::collections::HashMap::new();
        for line in header.lines() {
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| format_err(format!("malformed header line {line:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| format_err(format!("RMDL header missing {k:?}")))
        };
        let num = |k: &str| -> Result<usize> {
            get(k)?
                .trim()
                .parse()
                .map_err(|_| format_err(format!("RMDL header field {k:?} is not an integer")))
        };
        if get("format")? != "RMDL" {
            return Err(format_err("not an RMDL file"));
        }
        if num("version")? != 1 {
            return Err(format_err(format!(
                "unsupported RMDL version {}",
                get("version")?
            )));
        }
        if num("layers")? != 2 {
            return Err(format_err("only two-layer models are supported"));
        }
        let shape = Shape::new(num("input_dim")?, num("hidden")?, num("classes")?)
            .map_err(|e| format_err(e.to_string()))?;
        if num("param_count")? != shape.param_count() {
            return Err(format_err("param_count disagrees with the declared shape"));
        }
        if body.len() != shape.param_count() * 4 {
            return Err(format_err(format!(
                "expected {} parameter bytes, found {}",
                shape.param_count() * 4,
                body.len()
            )));
        }
        let params = body
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        let class_names = get("class_names")?.split(',').map(str::to_string).collect();
        let net = Network::from_params(shape, params).map_err(|e| format_err(e.to_string()))?;
        Model::new(
            net,
            class_names,
            fields.get("provenance").copied().unwrap_or(""),
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
