use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::ModelConfig;
use crate::num::Scalar;

/// One pre-normalization encoder block. Weight matrices are stored
/// `[in, out]` so a layer computes `x.dot(w) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<T> {
    pub ln1_g: Array1<T>,
    pub ln1_b: Array1<T>,
    pub wq: Array2<T>,
    pub bq: Array1<T>,
    /// Keys carry no bias: it would shift every score of a query equally.
    pub wk: Array2<T>,
    pub wv: Array2<T>,
    pub bv: Array1<T>,
    pub wo: Array2<T>,
    pub bo: Array1<T>,
    pub ln2_g: Array1<T>,
    pub ln2_b: Array1<T>,
    pub w1: Array2<T>,
    pub b1: Array1<T>,
    pub w2: Array2<T>,
    pub b2: Array1<T>,
}

const BLOCK_NAMES: [&str; 15] = [
    "ln1_g", "ln1_b", "wq", "bq", "wk", "wv", "bv", "wo", "bo", "ln2_g", "ln2_b", "w1", "b1", "w2", "b2",
];

macro_rules! block_tensors {
    ($b:expr, $get:ident) => {
        [
            $b.ln1_g.$get(),
            $b.ln1_b.$get(),
            $b.wq.$get(),
            $b.bq.$get(),
            $b.wk.$get(),
            $b.wv.$get(),
            $b.bv.$get(),
            $b.wo.$get(),
            $b.bo.$get(),
            $b.ln2_g.$get(),
            $b.ln2_b.$get(),
            $b.w1.$get(),
            $b.b1.$get(),
            $b.w2.$get(),
            $b.b2.$get(),
        ]
    };
}

/// All trainable tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<T> {
    pub tok_emb: Array2<T>,
    pub pos_emb: Array2<T>,
    pub blocks: Vec<Block<T>>,
    pub lnf_g: Array1<T>,
    pub lnf_b: Array1<T>,
    /// Classification weights `W_c` and bias `b_c` (length 1).
    pub cls_w: Array1<T>,
    pub cls_b: Array1<T>,
    /// Reconstruction projection `[V, d]` and bias `[V]`.
    pub rec_w: Array2<T>,
    pub rec_b: Array1<T>,
}

impl<T: Scalar> Params<T> {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        let (d, f, v) = (cfg.d_model, cfg.d_ff, cfg.vocab_size);
        let z1 = |n| Array1::zeros(n);
        let z2 = |r, c| Array2::zeros((r, c));
        let block = || Block {
            ln1_g: z1(d),
            ln1_b: z1(d),
            wq: z2(d, d),
            bq: z1(d),
            wk: z2(d, d),
            wv: z2(d, d),
            bv: z1(d),
            wo: z2(d, d),
            bo: z1(d),
            ln2_g: z1(d),
            ln2_b: z1(d),
            w1: z2(d, f),
            b1: z1(f),
            w2: z2(f, d),
            b2: z1(d),
        };
        Params {
            tok_emb: z2(v, d),
            pos_emb: z2(cfg.max_len, d),
            blocks: (0..cfg.layers).map(|_| block()).collect(),
            lnf_g: z1(d),
            lnf_b: z1(d),
            cls_w: z1(d),
            cls_b: z1(1),
            rec_w: z2(v, d),
            rec_b: z1(v),
        }
    }

    /// Weights and embeddings from N(0, std²), biases zero, layer-norm gains one.
    pub fn init<R: Rng + ?Sized>(cfg: &ModelConfig, std: f64, rng: &mut R) -> Self {
        let mut p = Self::zeros(cfg);
        let normal = Normal::new(0.0, std).expect("finite standard deviation");
        let mut fill = |a: &mut [T]| a.iter_mut().for_each(|x| *x = T::of(normal.sample(rng)));
        fill(p.tok_emb.as_slice_mut().unwrap());
        fill(p.pos_emb.as_slice_mut().unwrap());
        for b in &mut p.blocks {
            for w in [&mut b.wq, &mut b.wk, &mut b.wv, &mut b.wo, &mut b.w1, &mut b.w2] {
                fill(w.as_slice_mut().unwrap());
            }
            b.ln1_g.fill(T::one());
            b.ln2_g.fill(T::one());
        }
        p.lnf_g.fill(T::one());
        fill(p.cls_w.as_slice_mut().unwrap());
        fill(p.rec_w.as_slice_mut().unwrap());
        p
    }

    /// Tensor names in storage order.
    pub fn names(&self) -> Vec<String> {
        let mut out = vec!["tok_emb".to_string(), "pos_emb".to_string()];
        for i in 0..self.blocks.len() {
            out.extend(BLOCK_NAMES.iter().map(|n| format!("blocks.{i}.{n}")));
        }
        out.extend(["lnf_g", "lnf_b", "cls_w", "cls_b", "rec_w", "rec_b"].map(String::from));
        out
    }

    pub fn tensors(&self) -> Vec<&[T]> {
        let mut out = vec![self.tok_emb.as_slice().unwrap(), self.pos_emb.as_slice().unwrap()];
        for b in &self.blocks {
            out.extend(block_tensors!(b, as_slice).map(Option::unwrap));
        }
        out.extend([&self.lnf_g, &self.lnf_b, &self.cls_w, &self.cls_b].map(|a| a.as_slice().unwrap()));
        out.push(self.rec_w.as_slice().unwrap());
        out.push(self.rec_b.as_slice().unwrap());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut out = vec![self.tok_emb.as_slice_mut().unwrap(), self.pos_emb.as_slice_mut().unwrap()];
        for b in &mut self.blocks {
            out.extend(block_tensors!(b, as_slice_mut).map(Option::unwrap));
        }
        out.push(self.lnf_g.as_slice_mut().unwrap());
        out.push(self.lnf_b.as_slice_mut().unwrap());
        out.push(self.cls_w.as_slice_mut().unwrap());
        out.push(self.cls_b.as_slice_mut().unwrap());
        out.push(self.rec_w.as_slice_mut().unwrap());
        out.push(self.rec_b.as_slice_mut().unwrap());
        out
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sq_norm(&self) -> T {
        self.tensors().iter().flat_map(|t| t.iter()).map(|&x| x * x).sum()
    }

    pub fn scale(&mut self, s: T) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    /// Element `i` in the flattened storage order.
    pub fn get_flat(&self, mut i: usize) -> T {
        for t in self.tensors() {
            if i < t.len() {
                return t[i];
            }
            i -= t.len();
        }
        panic!("flat index out of range")
    }

    pub fn set_flat(&mut self, mut i: usize, v: T) {
        for t in self.tensors_mut() {
            if i < t.len() {
                t[i] = v;
                return;
            }
            i -= t.len();
        }
        panic!("flat index out of range")
    }

    /// Element-wise conversion to another scalar type.
    pub fn cast<U: Scalar>(&self, cfg: &ModelConfig) -> Params<U> {
        let mut out = Params::<U>::zeros(cfg);
        for (dst, src) in out.tensors_mut().into_iter().zip(self.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = U::of(s.to_f64_lossy());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn cfg() -> ModelConfig {
        ModelConfig { d_model: 8, layers: 2, heads: 2, d_ff: 16, max_len: 10, vocab_size: 20, ..Default::default() }
    }

    #[test]
    fn tensor_listing_is_consistent() {
        let p = Params::<f64>::zeros(&cfg());
        assert_eq!(p.names().len(), p.tensors().len());
        let expected = 20 * 8 + 10 * 8 + 2 * (4 * 8 + 4 * (64 + 8) - 8 + 8 * 16 + 16 + 16 * 8 + 8) + 2 * 8 + 8 + 1 + 20 * 8 + 20;
        assert_eq!(p.len(), expected);
    }

    #[test]
    fn init_statistics() {
        let c = ModelConfig { d_model: 64, d_ff: 256, vocab_size: 300, ..cfg() };
        let p = Params::<f64>::init(&c, 0.02, &mut substream(0, "init"));
        let w = p.blocks[0].w1.as_slice().unwrap();
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let sd = (w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-3 && (sd - 0.02).abs() < 1e-3, "{mean} {sd}");
        assert!(p.blocks[1].b1.iter().all(|&b| b == 0.0));
        assert!(p.lnf_g.iter().all(|&g| g == 1.0));
    }

    #[test]
    fn flat_access_round_trips() {
        let mut p = Params::<f32>::zeros(&cfg());
        let n = p.len();
        p.set_flat(n - 1, 3.0);
        p.set_flat(0, 1.0);
        assert_eq!(p.rec_b[19], 3.0);
        assert_eq!(p.tok_emb[[0, 0]], 1.0);
        assert_eq!(p.get_flat(n - 1), 3.0);
    }
}
