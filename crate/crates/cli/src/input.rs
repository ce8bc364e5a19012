use std::path::Path;

use sandpile_torsor::io::{parse_graph, parse_matrix};
use sandpile_torsor::planar::{planar_signature, PlaneGraph};
use sandpile_torsor::{Error, RegularMatroid, Result, SignaturePair, TuCheck};

use crate::InputFormat;

/// A loaded input: the matroid and, for plane graphs, the embedding.
pub struct Loaded {
    pub matroid: RegularMatroid,
    pub plane: Option<PlaneGraph>,
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{path}: {e}"))))
}

fn guess(path: &str) -> InputFormat {
    match Path::new(path).extension().and_then(|e| e.to_str()) {
        Some("json") => InputFormat::PlaneGraph,
        Some("graph") => InputFormat::Graph,
        _ => InputFormat::Matrix,
    }
}

pub fn load(path: &str, format: Option<InputFormat>) -> Result<Loaded> {
    let text = read(path)?;
    match format.unwrap_or_else(|| guess(path)) {
        InputFormat::Matrix => Ok(Loaded {
            matroid: parse_matrix(&text)?.matroid(TuCheck::Auto)?,
            plane: None,
        }),
        InputFormat::Graph => Ok(Loaded {
            matroid: RegularMatroid::from_graph(&parse_graph(&text)?)?,
            plane: None,
        }),
        InputFormat::PlaneGraph => {
            let plane = PlaneGraph::from_json(&text)?;
            Ok(Loaded {
                matroid: plane.matroid()?,
                plane: Some(plane),
            })
        }
    }
}

/// The signature pair from `path`, or the planar pair of a plane-graph input.
pub fn pair(loaded: &Loaded, path: Option<&str>) -> Result<SignaturePair> {
    match (path, &loaded.plane) {
        (Some(p), _) => SignaturePair::parse(&loaded.matroid, &read(p)?),
        (None, Some(plane)) => Ok(planar_signature(plane)?.pair),
        (None, None) => Err(Error::InvalidSignature(
            "a signature file is required unless the input is a plane graph".into(),
        )),
    }
}
