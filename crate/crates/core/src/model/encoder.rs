use ndarray::{s, Array1, Array2, Axis};

use super::batch::EncodedBatch;
use super::layers::{
    dropout_mask, gelu, gelu_grad, layer_norm, layer_norm_backward, linear, linear_backward, log_sum_exp,
    softmax_backward, softmax_rows, LnCache,
};
use super::loss::{classification_loss_from_logit, LossParts};
use super::params::Params;
use super::ModelConfig;
use crate::corpus::PAD_ID;
use crate::error::{Error, Result};
use crate::num::{from_usize, Scalar};
use crate::rng::{substream, StreamRng};

/// Encoder plus both heads.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorerModel<T> {
    pub config: ModelConfig,
    pub params: Params<T>,
}

/// One sequence with masked positions removed: token ids, their original
/// positions, and reconstruction targets at those positions.
#[derive(Debug, Clone, Default)]
pub(crate) struct Packed {
    pub ids: Vec<usize>,
    pub positions: Vec<usize>,
    pub targets: Vec<usize>,
}

struct BlockCache<T> {
    ln1: LnCache<T>,
    h1: Array2<T>,
    q: Array2<T>,
    k: Array2<T>,
    v: Array2<T>,
    /// Attention weights per (segment, head), segment-major.
    probs: Vec<Array2<T>>,
    att: Array2<T>,
    drop_att: Option<Array2<T>>,
    ln2: LnCache<T>,
    h2: Array2<T>,
    u: Array2<T>,
    f: Array2<T>,
    drop_ff: Option<Array2<T>>,
}

/// Activations of one forward pass over a packed batch.
pub struct Forward<T> {
    /// Final normalized hidden states, one row per unmasked token.
    pub hidden: Array2<T>,
    /// `(start row, length)` of each sequence in `hidden`.
    pub segments: Vec<(usize, usize)>,
    ids: Vec<usize>,
    positions: Vec<usize>,
    drop_emb: Option<Array2<T>>,
    blocks: Vec<BlockCache<T>>,
    lnf: LnCache<T>,
}

impl<T: Scalar> Forward<T> {
    /// Pooled vector of sequence `i`: the hidden state at its first position.
    pub fn pooled(&self, i: usize) -> Array1<T> {
        self.hidden.row(self.segments[i].0).to_owned()
    }
}

fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

impl<T: Scalar> ScorerModel<T> {
    /// Fresh model with N(0, 0.02²) weights drawn from the `init` stream of `seed`.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        Self::with_init_std(config, seed, 0.02)
    }

    pub fn with_init_std(config: ModelConfig, seed: u64, std: f64) -> Result<Self> {
        config.validate()?;
        let params = Params::init(&config, std, &mut substream(seed, "init"));
        Ok(ScorerModel { config, params })
    }

    pub fn from_params(config: ModelConfig, params: Params<T>) -> Result<Self> {
        config.validate()?;
        let shapes_ok = params
            .tensors()
            .iter()
            .zip(Params::<T>::zeros(&config).tensors())
            .all(|(a, b)| a.len() == b.len())
            && params.blocks.len() == config.layers;
        if !shapes_ok {
            return Err(Error::Config("parameter shapes do not match the model config".into()));
        }
        Ok(ScorerModel { config, params })
    }

    fn check_sequence(&self, ids: &[usize], mask: &[bool]) -> Result<()> {
        if ids.len() != mask.len() {
            return Err(Error::InvalidArgument(format!(
                "{} token ids but {} mask entries",
                ids.len(),
                mask.len()
            )));
        }
        if ids.len() > self.config.max_len {
            return Err(Error::SequenceTooLong { len: ids.len(), max: self.config.max_len });
        }
        if let Some(&id) = ids.iter().find(|&&id| id >= self.config.vocab_size) {
            return Err(Error::TokenOutOfRange { id, size: self.config.vocab_size });
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::InvalidArgument("sequence is fully masked".into()));
        }
        Ok(())
    }

    pub(crate) fn pack(&self, ids: &[usize], mask: &[bool], targets: Option<&[usize]>) -> Result<Packed> {
        self.check_sequence(ids, mask)?;
        let mut p = Packed::default();
        for (i, (&id, &m)) in ids.iter().zip(mask).enumerate() {
            if m {
                p.ids.push(id);
                p.positions.push(i);
                p.targets.push(targets.map_or(PAD_ID, |t| t.get(i).copied().unwrap_or(PAD_ID)));
            }
        }
        Ok(p)
    }

    pub(crate) fn forward(&self, seqs: &[Packed], mut rng: Option<&mut StreamRng>) -> Forward<T> {
        let cfg = &self.config;
        let p = &self.params;
        let d = cfg.d_model;
        let heads = cfg.heads;
        let dh = cfg.head_dim();
        let scale = T::one() / from_usize::<T>(dh).sqrt();
        let drop = if rng.is_some() && cfg.dropout > 0.0 { cfg.dropout } else { 0.0 };

        let mut segments = Vec::with_capacity(seqs.len());
        let mut ids = Vec::new();
        let mut positions = Vec::new();
        for s in seqs {
            segments.push((ids.len(), s.ids.len()));
            ids.extend_from_slice(&s.ids);
            positions.extend_from_slice(&s.positions);
        }
        let n = ids.len();

        let mut x = Array2::<T>::zeros((n, d));
        for (r, (&id, &pos)) in ids.iter().zip(&positions).enumerate() {
            let mut row = x.row_mut(r);
            row.assign(&p.tok_emb.row(id));
            row += &p.pos_emb.row(pos);
        }
        let mut mask_for = |shape: (usize, usize)| -> Option<Array2<T>> {
            if drop > 0.0 {
                rng.as_deref_mut().map(|r| dropout_mask(shape, drop, r))
            } else {
                None
            }
        };
        let drop_emb = mask_for((n, d));
        if let Some(m) = &drop_emb {
            x *= m;
        }

        let mut blocks = Vec::with_capacity(p.blocks.len());
        for b in &p.blocks {
            let (h1, ln1) = layer_norm(&x, &b.ln1_g, &b.ln1_b);
            let q = linear(&h1, &b.wq, &b.bq);
            let k = h1.dot(&b.wk);
            let v = linear(&h1, &b.wv, &b.bv);
            let mut att = Array2::<T>::zeros((n, d));
            let mut probs = Vec::with_capacity(segments.len() * heads);
            for &(st, len) in &segments {
                for h in 0..heads {
                    let cols = h * dh..(h + 1) * dh;
                    let qs = q.slice(s![st..st + len, cols.clone()]);
                    let ks = k.slice(s![st..st + len, cols.clone()]);
                    let vs = v.slice(s![st..st + len, cols.clone()]);
                    let mut pm = qs.dot(&ks.t());
                    pm *= scale;
                    softmax_rows(pm.view_mut());
                    att.slice_mut(s![st..st + len, cols]).assign(&pm.dot(&vs));
                    probs.push(pm);
                }
            }
            let mut o = linear(&att, &b.wo, &b.bo);
            let drop_att = mask_for((n, d));
            if let Some(m) = &drop_att {
                o *= m;
            }
            x += &o;

            let (h2, ln2) = layer_norm(&x, &b.ln2_g, &b.ln2_b);
            let u = linear(&h2, &b.w1, &b.b1);
            let f = u.mapv(gelu);
            let mut g = linear(&f, &b.w2, &b.b2);
            let drop_ff = mask_for((n, d));
            if let Some(m) = &drop_ff {
                g *= m;
            }
            x += &g;
            blocks.push(BlockCache { ln1, h1, q, k, v, probs, att, drop_att, ln2, h2, u, f, drop_ff });
        }
        let (hidden, lnf) = layer_norm(&x, &p.lnf_g, &p.lnf_b);
        Forward { hidden, segments, ids, positions, drop_emb, blocks, lnf }
    }

    /// Gradients of all encoder parameters given the gradient of the loss
    /// with respect to `fwd.hidden`, accumulated into `grads`.
    pub(crate) fn backward(&self, fwd: &Forward<T>, d_hidden: &Array2<T>, grads: &mut Params<T>) {
        let p = &self.params;
        let heads = self.config.heads;
        let dh = self.config.head_dim();
        let scale = T::one() / from_usize::<T>(dh).sqrt();

        let mut dx = layer_norm_backward(&fwd.lnf, &p.lnf_g, d_hidden, &mut grads.lnf_g, &mut grads.lnf_b);
        for ((b, c), g) in p.blocks.iter().zip(&fwd.blocks).zip(grads.blocks.iter_mut()).rev() {
            let mut dg = dx.clone();
            if let Some(m) = &c.drop_ff {
                dg *= m;
            }
            let mut du = linear_backward(&c.f, &b.w2, &dg, &mut g.w2, &mut g.b2);
            du.zip_mut_with(&c.u, |d, &u| *d *= gelu_grad(u));
            let dh2 = linear_backward(&c.h2, &b.w1, &du, &mut g.w1, &mut g.b1);
            dx += &layer_norm_backward(&c.ln2, &b.ln2_g, &dh2, &mut g.ln2_g, &mut g.ln2_b);

            let mut d_o = dx.clone();
            if let Some(m) = &c.drop_att {
                d_o *= m;
            }
            let datt = linear_backward(&c.att, &b.wo, &d_o, &mut g.wo, &mut g.bo);
            let mut dq = Array2::<T>::zeros(c.q.raw_dim());
            let mut dk = Array2::<T>::zeros(c.k.raw_dim());
            let mut dv = Array2::<T>::zeros(c.v.raw_dim());
            let mut pi = 0;
            for &(st, len) in &fwd.segments {
                for h in 0..heads {
                    let rows = st..st + len;
                    let cols = h * dh..(h + 1) * dh;
                    let pm = &c.probs[pi];
                    pi += 1;
                    let da = datt.slice(s![rows.clone(), cols.clone()]);
                    let qs = c.q.slice(s![rows.clone(), cols.clone()]);
                    let ks = c.k.slice(s![rows.clone(), cols.clone()]);
                    let vs = c.v.slice(s![rows.clone(), cols.clone()]);
                    let dp = da.dot(&vs.t());
                    dv.slice_mut(s![rows.clone(), cols.clone()]).assign(&pm.t().dot(&da));
                    let mut ds = softmax_backward(pm.view(), &dp);
                    ds *= scale;
                    dq.slice_mut(s![rows.clone(), cols.clone()]).assign(&ds.dot(&ks));
                    dk.slice_mut(s![rows, cols]).assign(&ds.t().dot(&qs));
                }
            }
            let mut dh1 = linear_backward(&c.h1, &b.wq, &dq, &mut g.wq, &mut g.bq);
            ndarray::linalg::general_mat_mul(T::one(), &c.h1.t(), &dk, T::one(), &mut g.wk);
            dh1 += &dk.dot(&b.wk.t());
            dh1 += &linear_backward(&c.h1, &b.wv, &dv, &mut g.wv, &mut g.bv);
            dx += &layer_norm_backward(&c.ln1, &b.ln1_g, &dh1, &mut g.ln1_g, &mut g.ln1_b);
        }
        if let Some(m) = &fwd.drop_emb {
            dx *= m;
        }
        for (r, (&id, &pos)) in fwd.ids.iter().zip(&fwd.positions).enumerate() {
            let row = dx.row(r);
            let mut t = grads.tok_emb.row_mut(id);
            t += &row;
            let mut q = grads.pos_emb.row_mut(pos);
            q += &row;
        }
    }

    fn logit_of(&self, pooled: &Array1<T>) -> T {
        pooled.dot(&self.params.cls_w) + self.params.cls_b[0]
    }

    fn rec_logits(&self, hidden: &Array2<T>) -> Array2<T> {
        let mut r = hidden.dot(&self.params.rec_w.t());
        r += &self.params.rec_b;
        r
    }

    /// Pooled vector and one hidden vector per position. Rows of masked
    /// positions are zero; masked positions are invisible to the others.
    pub fn encode(&self, ids: &[usize], mask: &[bool]) -> Result<(Array1<T>, Array2<T>)> {
        let packed = self.pack(ids, mask, None)?;
        let fwd = self.forward(std::slice::from_ref(&packed), None);
        let mut out = Array2::zeros((ids.len(), self.config.d_model));
        for (r, &pos) in packed.positions.iter().enumerate() {
            out.row_mut(pos).assign(&fwd.hidden.row(r));
        }
        Ok((fwd.pooled(0), out))
    }

    pub fn logit(&self, ids: &[usize], mask: &[bool]) -> Result<T> {
        let (pooled, _) = self.encode(ids, mask)?;
        Ok(self.logit_of(&pooled))
    }

    /// Probability that the sequence is human-written.
    pub fn score(&self, ids: &[usize], mask: &[bool]) -> Result<T> {
        Ok(sigmoid(self.logit(ids, mask)?))
    }

    /// Reconstruction logits, one row over the vocabulary per position.
    pub fn reconstruction_logits(&self, ids: &[usize], mask: &[bool]) -> Result<Array2<T>> {
        let (_, hidden) = self.encode(ids, mask)?;
        Ok(self.rec_logits(&hidden))
    }

    /// Reconstruction distributions; rows of masked positions are zero.
    pub fn reconstruction_probs(&self, ids: &[usize], mask: &[bool]) -> Result<Array2<T>> {
        let mut r = self.reconstruction_logits(ids, mask)?;
        softmax_rows(r.view_mut());
        for (mut row, &m) in r.rows_mut().into_iter().zip(mask) {
            if !m {
                row.fill(T::zero());
            }
        }
        Ok(r)
    }

    fn packed_batch(&self, batch: &EncodedBatch) -> Result<Vec<Packed>> {
        (0..batch.len())
            .map(|i| {
                let ids = batch.ids.row(i);
                let mask = batch.mask.row(i);
                let targets = batch.targets.row(i);
                self.pack(
                    ids.as_slice().expect("standard layout"),
                    mask.as_slice().expect("standard layout"),
                    Some(targets.as_slice().expect("standard layout")),
                )
            })
            .collect()
    }

    /// Batch loss in inference mode.
    pub fn loss(&self, batch: &EncodedBatch, lambda: f64) -> Result<LossParts<T>> {
        let seqs = self.packed_batch(batch)?;
        let fwd = self.forward(&seqs, None);
        Ok(self.heads(&fwd, &seqs, &batch.y, lambda, None))
    }

    /// Batch loss and its gradient. Dropout is active when `rng` is given.
    pub fn loss_and_grad(
        &self,
        batch: &EncodedBatch,
        lambda: f64,
        rng: Option<&mut StreamRng>,
    ) -> Result<(LossParts<T>, Params<T>)> {
        let seqs = self.packed_batch(batch)?;
        let fwd = self.forward(&seqs, rng);
        let mut grads = Params::zeros(&self.config);
        let mut d_hidden = Array2::zeros(fwd.hidden.raw_dim());
        let parts = self.heads(&fwd, &seqs, &batch.y, lambda, Some((&mut grads, &mut d_hidden)));
        self.backward(&fwd, &d_hidden, &mut grads);
        Ok((parts, grads))
    }

    /// Losses of both heads; with `grad`, also their parameter gradients and
    /// the gradient flowing into the hidden states.
    fn heads(
        &self,
        fwd: &Forward<T>,
        seqs: &[Packed],
        y: &[u8],
        lambda: f64,
        mut grad: Option<(&mut Params<T>, &mut Array2<T>)>,
    ) -> LossParts<T> {
        let n = from_usize::<T>(seqs.len());
        let lam = T::of(lambda);
        let mut lc_sum = T::zero();
        for (i, &label) in y.iter().enumerate() {
            let pooled = fwd.pooled(i);
            let z = self.logit_of(&pooled);
            lc_sum += classification_loss_from_logit(z, label);
            if let Some((g, dh)) = grad.as_mut() {
                let dz = (sigmoid(z) - T::of(f64::from(label))) / n;
                g.cls_w.scaled_add(dz, &pooled);
                g.cls_b[0] += dz;
                dh.row_mut(fwd.segments[i].0).scaled_add(dz, &self.params.cls_w);
            }
        }

        let mut lr_sum = T::zero();
        if lambda > 0.0 {
            let logits = self.rec_logits(&fwd.hidden);
            let mut d_logits = grad.as_ref().map(|_| Array2::<T>::zeros(logits.raw_dim()));
            for (seq, &(st, len)) in seqs.iter().zip(&fwd.segments) {
                let count = seq.targets.iter().filter(|&&t| t != PAD_ID).count();
                if count == 0 {
                    continue;
                }
                let cnt = from_usize::<T>(count);
                let mut nll = T::zero();
                for (r, &t) in (st..st + len).zip(&seq.targets) {
                    if t == PAD_ID {
                        continue;
                    }
                    let row = logits.row(r);
                    let lse = log_sum_exp(row);
                    nll += lse - row[t];
                    if let Some(dl) = d_logits.as_mut() {
                        let w = lam / (n * cnt);
                        let mut drow = dl.row_mut(r);
                        drow.assign(&row.mapv(|v| (v - lse).exp() * w));
                        drow[t] -= w;
                    }
                }
                lr_sum += nll / cnt;
            }
            if let (Some((g, dh)), Some(dl)) = (grad.as_mut(), d_logits) {
                ndarray::linalg::general_mat_mul(T::one(), &dl.t(), &fwd.hidden, T::one(), &mut g.rec_w);
                g.rec_b += &dl.sum_axis(Axis(0));
                ndarray::linalg::general_mat_mul(T::one(), &dl, &self.params.rec_w, T::one(), *dh);
            }
        }
        let classification = lc_sum / n;
        let reconstruction = lr_sum / n;
        LossParts { combined: classification + lam * reconstruction, classification, reconstruction }
    }
}
