//! The computation tape: append-only op graph with reverse-mode gradients.
//!
//! `grad` builds the backward pass out of ordinary tape ops, so gradients
//! are themselves differentiable — calling `grad` on an expression that
//! contains gradient nodes yields exact second-order derivatives (used for
//! the critic's gradient penalty).

use crate::kernels;
use crate::tensor::Tensor;

/// Handle to a tape node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(pub(crate) usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    /// Identity with no gradient flow.
    Detach(Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    AddScalar(Var, f64),
    /// x^p elementwise; x must stay positive when p is fractional.
    PowConst(Var, f64),
    LeakyRelu(Var, f64),
    /// Derivative mask of leaky relu: 1 where x > 0, else the slope. No
    /// gradient of its own (zero almost everywhere).
    StepMask(Var, f64),
    Sigmoid(Var),
    Conv2d(Var, Var),
    FlipT(Var),
    ConvDW {
        x: Var,
        gy: Var,
        kh: usize,
        kw: usize,
    },
    Linear(Var, Var),
    Transpose2(Var),
    /// [B,O] + [O]
    AddBiasRows(Var, Var),
    /// [B,O] -> [O]
    SumRows(Var),
    /// [O] -> [B,O]
    BroadcastRows(Var, usize),
    /// [B,C,H,W] + [C]
    AddBiasChan(Var, Var),
    /// [B,C,H,W] -> [C]
    SumBhw(Var),
    /// [C] -> [B,C,H,W]
    BroadcastChan(Var, [usize; 3]),
    /// [B,C,H,W] * [B,C] broadcast over H,W
    MulChanBc(Var, Var),
    /// [B,C,H,W] + [B,C] broadcast over H,W
    AddChanBc(Var, Var),
    /// [B,C,H,W] -> [B,C]
    MeanHw(Var),
    /// [B,C] -> [B,C,H,W]
    BroadcastHw(Var, [usize; 2]),
    /// [B,C,H,W] -> [B]
    SumChw(Var),
    /// [B] -> [B,C,H,W]
    BroadcastChw(Var, [usize; 3]),
    /// [B] -> scalar
    MeanBatch(Var),
    /// scalar -> [B]
    BroadcastBatch(Var, usize),
    ConcatChan(Var, Var),
    SliceChan {
        x: Var,
        from: usize,
        to: usize,
    },
    AvgPool2(Var),
    Upsample2(Var),
    Reshape(Var, Vec<usize>),
}

struct Node {
    op: Op,
    value: Tensor,
}

/// Append-only computation graph.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: Tensor) -> Var {
        self.nodes.push(Node { op, value });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push(Op::Leaf, value)
    }

    pub fn detach(&mut self, x: Var) -> Var {
        let value = self.value(x).clone();
        self.push(Op::Detach(x), value)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).zip(self.value(b), |x, y| x + y);
        self.push(Op::Add(a, b), value)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).zip(self.value(b), |x, y| x - y);
        self.push(Op::Sub(a, b), value)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).zip(self.value(b), |x, y| x * y);
        self.push(Op::Mul(a, b), value)
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let value = self.value(a).map(|x| x * c);
        self.push(Op::Scale(a, c), value)
    }

    pub fn add_scalar(&mut self, a: Var, c: f64) -> Var {
        let value = self.value(a).map(|x| x + c);
        self.push(Op::AddScalar(a, c), value)
    }

    pub fn pow_const(&mut self, a: Var, p: f64) -> Var {
        let value = self.value(a).map(|x| x.powf(p));
        self.push(Op::PowConst(a, p), value)
    }

    pub fn leaky_relu(&mut self, a: Var, slope: f64) -> Var {
        let value = self.value(a).map(|x| if x > 0.0 { x } else { slope * x });
        self.push(Op::LeakyRelu(a, slope), value)
    }

    fn step_mask(&mut self, a: Var, slope: f64) -> Var {
        let value = self.value(a).map(|x| if x > 0.0 { 1.0 } else { slope });
        self.push(Op::StepMask(a, slope), value)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let value = self.value(a).map(|x| 1.0 / (1.0 + (-x).exp()));
        self.push(Op::Sigmoid(a), value)
    }

    pub fn conv2d(&mut self, x: Var, w: Var) -> Var {
        let value = kernels::conv2d(self.value(x), self.value(w));
        self.push(Op::Conv2d(x, w), value)
    }

    pub fn flip_transpose_kernel(&mut self, w: Var) -> Var {
        let value = kernels::flip_transpose_kernel(self.value(w));
        self.push(Op::FlipT(w), value)
    }

    pub fn conv2d_dweight(&mut self, x: Var, gy: Var, kh: usize, kw: usize) -> Var {
        let value = kernels::conv2d_dweight(self.value(x), self.value(gy), kh, kw);
        self.push(Op::ConvDW { x, gy, kh, kw }, value)
    }

    pub fn linear(&mut self, x: Var, w: Var) -> Var {
        let value = kernels::linear(self.value(x), self.value(w));
        self.push(Op::Linear(x, w), value)
    }

    pub fn transpose2(&mut self, w: Var) -> Var {
        let value = kernels::transpose2(self.value(w));
        self.push(Op::Transpose2(w), value)
    }

    pub fn add_bias_rows(&mut self, x: Var, b: Var) -> Var {
        let xv = self.value(x);
        let bv = self.value(b);
        let (rows, cols) = (xv.shape()[0], xv.shape()[1]);
        assert_eq!(bv.shape(), [cols], "bias shape mismatch");
        let mut data = xv.data().to_vec();
        for r in 0..rows {
            for c in 0..cols {
                data[r * cols + c] += bv.data()[c];
            }
        }
        let value = Tensor::from_vec(&[rows, cols], data);
        self.push(Op::AddBiasRows(x, b), value)
    }

    pub fn sum_rows(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        let (rows, cols) = (xv.shape()[0], xv.shape()[1]);
        let mut data = vec![0.0; cols];
        for r in 0..rows {
            for c in 0..cols {
                data[c] += xv.data()[r * cols + c];
            }
        }
        let value = Tensor::from_vec(&[cols], data);
        self.push(Op::SumRows(x), value)
    }

    pub fn broadcast_rows(&mut self, b: Var, batch: usize) -> Var {
        let bv = self.value(b);
        let cols = bv.shape()[0];
        let mut data = Vec::with_capacity(batch * cols);
        for _ in 0..batch {
            data.extend_from_slice(bv.data());
        }
        let value = Tensor::from_vec(&[batch, cols], data);
        self.push(Op::BroadcastRows(b, batch), value)
    }

    pub fn add_bias_chan(&mut self, x: Var, b: Var) -> Var {
        let xv = self.value(x);
        let bv = self.value(b);
        let (bs, c, h, w) = kernels::shape4(xv);
        assert_eq!(bv.shape(), [c], "channel bias mismatch");
        let hw = h * w;
        let mut data = xv.data().to_vec();
        for bi in 0..bs {
            for ci in 0..c {
                let base = (bi * c + ci) * hw;
                let add = bv.data()[ci];
                for v in &mut data[base..base + hw] {
                    *v += add;
                }
            }
        }
        let value = Tensor::from_vec(&[bs, c, h, w], data);
        self.push(Op::AddBiasChan(x, b), value)
    }

    pub fn sum_bhw(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        let (bs, c, h, w) = kernels::shape4(xv);
        let hw = h * w;
        let mut data = vec![0.0; c];
        for bi in 0..bs {
            for ci in 0..c {
                let base = (bi * c + ci) * hw;
                data[ci] += xv.data()[base..base + hw].iter().sum::<f64>();
            }
        }
        let value = Tensor::from_vec(&[c], data);
        self.push(Op::SumBhw(x), value)
    }

    pub fn broadcast_chan(&mut self, b: Var, batch: usize, h: usize, w: usize) -> Var {
        let bv = self.value(b);
        let c = bv.shape()[0];
        let hw = h * w;
        let mut data = vec![0.0; batch * c * hw];
        for bi in 0..batch {
            for ci in 0..c {
                let base = (bi * c + ci) * hw;
                data[base..base + hw].fill(bv.data()[ci]);
            }
        }
        let value = Tensor::from_vec(&[batch, c, h, w], data);
        self.push(Op::BroadcastChan(b, [batch, h, w]), value)
    }

    pub fn mul_chan_bc(&mut self, x: Var, s: Var) -> Var {
        let value = self.chan_bc_apply(x, s, |a, b| a * b);
        self.push(Op::MulChanBc(x, s), value)
    }

    pub fn add_chan_bc(&mut self, x: Var, s: Var) -> Var {
        let value = self.chan_bc_apply(x, s, |a, b| a + b);
        self.push(Op::AddChanBc(x, s), value)
    }

    fn chan_bc_apply(&self, x: Var, s: Var, f: impl Fn(f64, f64) -> f64) -> Tensor {
        let xv = self.value(x);
        let sv = self.value(s);
        let (bs, c, h, w) = kernels::shape4(xv);
        assert_eq!(sv.shape(), [bs, c], "per-sample channel scale mismatch");
        let hw = h * w;
        let mut data = Vec::with_capacity(xv.numel());
        for bi in 0..bs {
            for ci in 0..c {
                let sval = sv.data()[bi * c + ci];
                let base = (bi * c + ci) * hw;
                data.extend(xv.data()[base..base + hw].iter().map(|&v| f(v, sval)));
            }
        }
        Tensor::from_vec(&[bs, c, h, w], data)
    }

    pub fn mean_hw(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        let (bs, c, h, w) = kernels::shape4(xv);
        let hw = (h * w) as f64;
        let mut data = Vec::with_capacity(bs * c);
        for bc in 0..bs * c {
            let base = bc * h * w;
            data.push(xv.data()[base..base + h * w].iter().sum::<f64>() / hw);
        }
        let value = Tensor::from_vec(&[bs, c], data);
        self.push(Op::MeanHw(x), value)
    }

    pub fn broadcast_hw(&mut self, s: Var, h: usize, w: usize) -> Var {
        let sv = self.value(s);
        let (bs, c) = (sv.shape()[0], sv.shape()[1]);
        let hw = h * w;
        let mut data = vec![0.0; bs * c * hw];
        for bc in 0..bs * c {
            data[bc * hw..(bc + 1) * hw].fill(sv.data()[bc]);
        }
        let value = Tensor::from_vec(&[bs, c, h, w], data);
        self.push(Op::BroadcastHw(s, [h, w]), value)
    }

    pub fn sum_chw(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        let (bs, c, h, w) = kernels::shape4(xv);
        let chw = c * h * w;
        let data = (0..bs)
            .map(|bi| xv.data()[bi * chw..(bi + 1) * chw].iter().sum::<f64>())
            .collect();
        let value = Tensor::from_vec(&[bs], data);
        self.push(Op::SumChw(x), value)
    }

    pub fn broadcast_chw(&mut self, v: Var, c: usize, h: usize, w: usize) -> Var {
        let vv = self.value(v);
        let bs = vv.shape()[0];
        let chw = c * h * w;
        let mut data = vec![0.0; bs * chw];
        for bi in 0..bs {
            data[bi * chw..(bi + 1) * chw].fill(vv.data()[bi]);
        }
        let value = Tensor::from_vec(&[bs, c, h, w], data);
        self.push(Op::BroadcastChw(v, [c, h, w]), value)
    }

    pub fn mean_batch(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        assert_eq!(xv.shape().len(), 1, "mean_batch expects a vector");
        let n = xv.shape()[0] as f64;
        let value = Tensor::scalar(xv.data().iter().sum::<f64>() / n);
        self.push(Op::MeanBatch(x), value)
    }

    pub fn broadcast_batch(&mut self, s: Var, batch: usize) -> Var {
        let value = Tensor::from_vec(&[batch], vec![self.value(s).item(); batch]);
        self.push(Op::BroadcastBatch(s, batch), value)
    }

    pub fn sum_batch(&mut self, x: Var) -> Var {
        let n = self.value(x).shape()[0];
        let m = self.mean_batch(x);
        self.scale(m, n as f64)
    }

    pub fn concat_chan(&mut self, a: Var, b: Var) -> Var {
        let av = self.value(a);
        let bv = self.value(b);
        let (bs, ca, h, w) = kernels::shape4(av);
        let (bs2, cb, h2, w2) = kernels::shape4(bv);
        assert_eq!((bs, h, w), (bs2, h2, w2), "concat_chan shape mismatch");
        let hw = h * w;
        let mut data = Vec::with_capacity((ca + cb) * bs * hw);
        for bi in 0..bs {
            data.extend_from_slice(&av.data()[bi * ca * hw..(bi + 1) * ca * hw]);
            data.extend_from_slice(&bv.data()[bi * cb * hw..(bi + 1) * cb * hw]);
        }
        let value = Tensor::from_vec(&[bs, ca + cb, h, w], data);
        self.push(Op::ConcatChan(a, b), value)
    }

    pub fn slice_chan(&mut self, x: Var, from: usize, to: usize) -> Var {
        let xv = self.value(x);
        let (bs, c, h, w) = kernels::shape4(xv);
        assert!(from < to && to <= c, "slice_chan {from}..{to} of {c}");
        let hw = h * w;
        let mut data = Vec::with_capacity(bs * (to - from) * hw);
        for bi in 0..bs {
            let base = (bi * c + from) * hw;
            data.extend_from_slice(&xv.data()[base..base + (to - from) * hw]);
        }
        let value = Tensor::from_vec(&[bs, to - from, h, w], data);
        self.push(Op::SliceChan { x, from, to }, value)
    }

    pub fn avg_pool2(&mut self, x: Var) -> Var {
        let value = kernels::avg_pool2(self.value(x));
        self.push(Op::AvgPool2(x), value)
    }

    pub fn upsample2(&mut self, x: Var) -> Var {
        let value = kernels::upsample2(self.value(x));
        self.push(Op::Upsample2(x), value)
    }

    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Var {
        let value = self.value(x).reshaped(shape);
        self.push(Op::Reshape(x, shape.to_vec()), value)
    }

    /// Gradient contributions of node `id` with upstream gradient `gy`,
    /// expressed as new tape ops so they remain differentiable.
    fn backward_contribs(&mut self, id: usize, gy: Var) -> Vec<(Var, Var)> {
        let op = self.nodes[id].op.clone();
        let y = Var(id);
        match op {
            Op::Leaf | Op::Detach(_) | Op::StepMask(..) => vec![],
            Op::Add(a, b) => vec![(a, gy), (b, gy)],
            Op::Sub(a, b) => {
                let neg = self.scale(gy, -1.0);
                vec![(a, gy), (b, neg)]
            }
            Op::Mul(a, b) => {
                let ga = self.mul(gy, b);
                let gb = self.mul(gy, a);
                vec![(a, ga), (b, gb)]
            }
            Op::Scale(a, c) => vec![(a, self.scale(gy, c))],
            Op::AddScalar(a, _) => vec![(a, gy)],
            Op::PowConst(a, p) => {
                let dp = self.pow_const(a, p - 1.0);
                let dps = self.scale(dp, p);
                vec![(a, self.mul(gy, dps))]
            }
            Op::LeakyRelu(a, slope) => {
                let mask = self.step_mask(a, slope);
                vec![(a, self.mul(gy, mask))]
            }
            Op::Sigmoid(a) => {
                // y * (1 - y)
                let neg_y = self.scale(y, -1.0);
                let one_minus = self.add_scalar(neg_y, 1.0);
                let dydx = self.mul(y, one_minus);
                vec![(a, self.mul(gy, dydx))]
            }
            Op::Conv2d(x, w) => {
                let wt = self.flip_transpose_kernel(w);
                let gx = self.conv2d(gy, wt);
                let ks = self.value(w).shape();
                let (kh, kw) = (ks[2], ks[3]);
                let gw = self.conv2d_dweight(x, gy, kh, kw);
                vec![(x, gx), (w, gw)]
            }
            Op::FlipT(w) => vec![(w, self.flip_transpose_kernel(gy))],
            Op::ConvDW { x, gy: g0, kh, kw } => {
                // y = dweight(x, g0) is bilinear in (x, g0).
                let _ = (kh, kw);
                let gyt = self.flip_transpose_kernel(gy);
                let gx = self.conv2d(g0, gyt);
                let gg = self.conv2d(x, gy);
                vec![(x, gx), (g0, gg)]
            }
            Op::Linear(x, w) => {
                let wt = self.transpose2(w);
                let gx = self.linear(gy, wt);
                let gyt = self.transpose2(gy);
                let xt = self.transpose2(x);
                let gw = self.linear(gyt, xt);
                vec![(x, gx), (w, gw)]
            }
            Op::Transpose2(w) => vec![(w, self.transpose2(gy))],
            Op::AddBiasRows(x, b) => {
                let gb = self.sum_rows(gy);
                vec![(x, gy), (b, gb)]
            }
            Op::SumRows(x) => {
                let batch = self.value(x).shape()[0];
                vec![(x, self.broadcast_rows(gy, batch))]
            }
            Op::BroadcastRows(b, _) => vec![(b, self.sum_rows(gy))],
            Op::AddBiasChan(x, b) => {
                let gb = self.sum_bhw(gy);
                vec![(x, gy), (b, gb)]
            }
            Op::SumBhw(x) => {
                let s = self.value(x).shape().to_vec();
                vec![(x, self.broadcast_chan(gy, s[0], s[2], s[3]))]
            }
            Op::BroadcastChan(b, _) => vec![(b, self.sum_bhw(gy))],
            Op::MulChanBc(x, s) => {
                let gx = self.mul_chan_bc(gy, s);
                let prod = self.mul(gy, x);
                let mh = self.mean_hw(prod);
                let hw = {
                    let sh = self.value(x).shape();
                    (sh[2] * sh[3]) as f64
                };
                let gs = self.scale(mh, hw);
                vec![(x, gx), (s, gs)]
            }
            Op::AddChanBc(x, s) => {
                let mh = self.mean_hw(gy);
                let hw = {
                    let sh = self.value(x).shape();
                    (sh[2] * sh[3]) as f64
                };
                let gs = self.scale(mh, hw);
                vec![(x, gy), (s, gs)]
            }
            Op::MeanHw(x) => {
                let sh = self.value(x).shape().to_vec();
                let bc = self.broadcast_hw(gy, sh[2], sh[3]);
                vec![(x, self.scale(bc, 1.0 / (sh[2] * sh[3]) as f64))]
            }
            Op::BroadcastHw(s, [h, w]) => {
                let mh = self.mean_hw(gy);
                vec![(s, self.scale(mh, (h * w) as f64))]
            }
            Op::SumChw(x) => {
                let sh = self.value(x).shape().to_vec();
                vec![(x, self.broadcast_chw(gy, sh[1], sh[2], sh[3]))]
            }
            Op::BroadcastChw(v, _) => vec![(v, self.sum_chw(gy))],
            Op::MeanBatch(x) => {
                let n = self.value(x).shape()[0];
                let bc = self.broadcast_batch(gy, n);
                vec![(x, self.scale(bc, 1.0 / n as f64))]
            }
            Op::BroadcastBatch(s, _) => vec![(s, self.mean_batch(gy))],
            Op::ConcatChan(a, b) => {
                let ca = self.value(a).shape()[1];
                let cb = self.value(b).shape()[1];
                let ga = self.slice_chan(gy, 0, ca);
                let gb = self.slice_chan(gy, ca, ca + cb);
                vec![(a, ga), (b, gb)]
            }
            Op::SliceChan { x, from, to } => {
                let sh = self.value(x).shape().to_vec();
                let (bs, c, h, w) = (sh[0], sh[1], sh[2], sh[3]);
                let mut g = gy;
                if from > 0 {
                    let left = self.leaf(Tensor::zeros(&[bs, from, h, w]));
                    g = self.concat_chan(left, g);
                }
                if to < c {
                    let right = self.leaf(Tensor::zeros(&[bs, c - to, h, w]));
                    g = self.concat_chan(g, right);
                }
                vec![(x, g)]
            }
            Op::AvgPool2(x) => {
                let up = self.upsample2(gy);
                vec![(x, self.scale(up, 0.25))]
            }
            Op::Upsample2(x) => {
                let down = self.avg_pool2(gy);
                vec![(x, self.scale(down, 4.0))]
            }
            Op::Reshape(x, _) => {
                let sh = self.value(x).shape().to_vec();
                vec![(x, self.reshape(gy, &sh))]
            }
        }
    }

    /// Reverse-mode gradients of the scalar `y` with respect to `wrt`.
    ///
    /// The returned gradients are tape nodes, so they can participate in
    /// further expressions and be differentiated again. Vars that do not
    /// influence `y` come back as `None` (gradient is identically zero).
    pub fn grad(&mut self, y: Var, wrt: &[Var]) -> Vec<Option<Var>> {
        assert_eq!(
            self.value(y).numel(),
            1,
            "grad target must be a scalar, got shape {:?}",
            self.value(y).shape()
        );
        let mut reachable = vec![false; y.0 + 1];
        let mut stack = vec![y.0];
        while let Some(id) = stack.pop() {
            if reachable[id] {
                continue;
            }
            reachable[id] = true;
            for input in op_inputs(&self.nodes[id].op) {
                if !reachable[input.0] {
                    stack.push(input.0);
                }
            }
        }

        let seed_shape = self.value(y).shape().to_vec();
        let seed = self.leaf(Tensor::ones(&seed_shape));
        let mut grads: Vec<Option<Var>> = vec![None; y.0 + 1];
        grads[y.0] = Some(seed);
        for id in (0..=y.0).rev() {
            if !reachable[id] {
                continue;
            }
            let Some(g) = grads[id] else { continue };
            for (input, contrib) in self.backward_contribs(id, g) {
                grads[input.0] = Some(match grads[input.0] {
                    None => contrib,
                    Some(acc) => self.add(acc, contrib),
                });
            }
        }
        wrt.iter()
            .map(|v| grads.get(v.0).copied().flatten())
            .collect()
    }
}

fn op_inputs(op: &Op) -> Vec<Var> {
    match *op {
        Op::Leaf => vec![],
        Op::Detach(_) | Op::StepMask(..) => vec![],
        Op::Add(a, b)
        | Op::Sub(a, b)
        | Op::Mul(a, b)
        | Op::Conv2d(a, b)
        | Op::Linear(a, b)
        | Op::AddBiasRows(a, b)
        | Op::AddBiasChan(a, b)
        | Op::MulChanBc(a, b)
        | Op::AddChanBc(a, b)
        | Op::ConcatChan(a, b) => vec![a, b],
        Op::ConvDW { x, gy, .. } => vec![x, gy],
        Op::Scale(a, _)
        | Op::AddScalar(a, _)
        | Op::PowConst(a, _)
        | Op::LeakyRelu(a, _)
        | Op::Sigmoid(a)
        | Op::FlipT(a)
        | Op::Transpose2(a)
        | Op::SumRows(a)
        | Op::BroadcastRows(a, _)
        | Op::SumBhw(a)
        | Op::BroadcastChan(a, _)
        | Op::MeanHw(a)
        | Op::BroadcastHw(a, _)
        | Op::SumChw(a)
        | Op::BroadcastChw(a, _)
        | Op::MeanBatch(a)
        | Op::BroadcastBatch(a, _)
        | Op::SliceChan { x: a, .. }
        | Op::AvgPool2(a)
        | Op::Upsample2(a)
        | Op::Reshape(a, _) => vec![a],
    }
}
