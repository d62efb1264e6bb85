//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! The page draws a 2D point cloud and lets the user explore three things
//! as the scale ε moves: the ε-components, the chain-ball `B^m(x, ε)` around a
//! clicked point, and a greedy chain-ball cover of the whole cloud.
//!
//! The exported methods are thin wrappers over plain Rust functions so the
//! logic is testable off the wasm target.

use chainmetric::{
    cover_with_graph, ChainGraph, CoverMethod, Depth, FiniteMetricSpace, Norm, SpaceSpec,
};
use wasm_bindgen::prelude::*;

/// `m <= 0` means an unbounded chain-ball.
fn depth_from(m: i32) -> Depth {
    if m <= 0 {
        Depth::Unbounded
    } else {
        Depth::Steps(m as usize)
    }
}

#[wasm_bindgen]
pub struct Demo {
    space: FiniteMetricSpace,
    xy: Vec<f64>,
}

impl Demo {
    pub fn random(n: usize, seed: u32) -> Result<Demo, String> {
        let spec = SpaceSpec::RandomCloud {
            n,
            dim: 2,
            seed: u64::from(seed),
        };
        let space = chainmetric::generate(&spec).map_err(|e| e.to_string())?.space;
        let xy = space
            .coords()
            .expect("point clouds keep coordinates")
            .iter()
            .flatten()
            .copied()
            .collect();
        Ok(Demo { space, xy })
    }

    pub fn from_xy(xy: &[f64]) -> Result<Demo, String> {
        if !xy.len().is_multiple_of(2) || xy.is_empty() {
            return Err("expected a nonempty flat list of x,y pairs".into());
        }
        let coords = xy.chunks(2).map(<[f64]>::to_vec).collect();
        let space = FiniteMetricSpace::from_points(coords, Norm::Euclidean).map_err(|e| e.to_string())?;
        Ok(Demo {
            space,
            xy: xy.to_vec(),
        })
    }

    pub fn component_ids(&self, eps: f64) -> Result<Vec<u32>, String> {
        let graph = ChainGraph::build(&self.space, eps).map_err(|e| e.to_string())?;
        Ok(graph.component_ids().iter().map(|&c| c as u32).collect())
    }

    /// Hop count from `center` for members of `B^m(center, eps)`, `-1` elsewhere.
    pub fn ball_hops(&self, eps: f64, center: usize, m: i32) -> Result<Vec<i32>, String> {
        let graph = ChainGraph::build(&self.space, eps).map_err(|e| e.to_string())?;
        let ball = graph.chain_ball(center, depth_from(m)).map_err(|e| e.to_string())?;
        let mut hops = vec![-1; self.space.len()];
        for (x, h) in ball.members.iter().zip(&ball.hop) {
            hops[x] = *h as i32;
        }
        Ok(hops)
    }

    pub fn cover_centers(&self, eps: f64, m: i32) -> Result<Vec<u32>, String> {
        let graph = ChainGraph::build(&self.space, eps).map_err(|e| e.to_string())?;
        let cover = cover_with_graph(
            &graph,
            &self.space.all_points(),
            depth_from(m),
            CoverMethod::Greedy,
            0,
        )
        .map_err(|e| e.to_string())?;
        Ok(cover.centers.iter().map(|&c| c as u32).collect())
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, seed: u32) -> Result<Demo, JsError> {
        Demo::random(n, seed).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = fromPoints)]
    pub fn from_points(xy: &[f64]) -> Result<Demo, JsError> {
        Demo::from_xy(xy).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(getter)]
    pub fn len(&self) -> usize {
        self.space.len()
    }

    #[wasm_bindgen(getter, js_name = isEmpty)]
    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Flat `[x0, y0, x1, y1, ...]` in the unit square.
    pub fn points(&self) -> Vec<f64> {
        self.xy.clone()
    }

    /// Component index per point at scale `eps`.
    pub fn components(&self, eps: f64) -> Result<Vec<u32>, JsError> {
        self.component_ids(eps).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = chainBall)]
    pub fn chain_ball(&self, eps: f64, center: usize, m: i32) -> Result<Vec<i32>, JsError> {
        self.ball_hops(eps, center, m).map_err(|e| JsError::new(&e))
    }

    pub fn cover(&self, eps: f64, m: i32) -> Result<Vec<u32>, JsError> {
        self.cover_centers(eps, m).map_err(|e| JsError::new(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_of_points() {
        let demo = Demo::from_xy(&[0.0, 0.0, 0.1, 0.0, 0.2, 0.0, 0.9, 0.0]).unwrap();
        assert_eq!(demo.component_ids(0.15).unwrap(), vec![0, 0, 0, 1]);
        assert_eq!(demo.ball_hops(0.15, 0, 1).unwrap(), vec![0, 1, -1, -1]);
        assert_eq!(demo.ball_hops(0.15, 0, 0).unwrap(), vec![0, 1, 2, -1]);
        assert_eq!(demo.cover_centers(0.15, 0).unwrap(), vec![0, 3]);
        assert_eq!(demo.cover_centers(0.15, 1).unwrap(), vec![1, 3]);
    }

    #[test]
    fn random_cloud_is_reproducible() {
        let a = Demo::random(30, 5).unwrap();
        let b = Demo::random(30, 5).unwrap();
        assert_eq!(a.xy, b.xy);
        assert_eq!(a.xy.len(), 60);
        assert!(a.xy.iter().all(|c| (0.0..1.0).contains(c)));
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(Demo::from_xy(&[0.0]).is_err());
        assert!(Demo::from_xy(&[0.0, 0.0, 0.0, 0.0]).is_err());
        let demo = Demo::random(5, 1).unwrap();
        assert!(demo.component_ids(-1.0).is_err());
        assert!(demo.ball_hops(0.1, 99, 1).is_err());
    }
}
