//! Dense forward kernels shared by the tape ops.
//!
//! Convolutions are stride-1 with same padding and odd kernels, implemented
//! as one im2col gather plus a single gemm over the whole batch.

use crate::tensor::{gemm, gemm_nt, Tensor};

/// Gathers x [B,C,H,W] into the column matrix [C*kh*kw, B*H*W] with zero
/// padding of (kh/2, kw/2).
fn im2col(x: &Tensor, kh: usize, kw: usize) -> Vec<f64> {
    let (b, c, h, w) = shape4(x);
    let (ph, pw) = (kh / 2, kw / 2);
    let hw = h * w;
    let bhw = b * hw;
    let mut col = vec![0.0; c * kh * kw * bhw];
    let xd = x.data();
    for ci in 0..c {
        for u in 0..kh {
            let di = u as isize - ph as isize;
            for v in 0..kw {
                let dj = v as isize - pw as isize;
                let row = (ci * kh + u) * kw + v;
                let col_base = row * bhw;
                let i_lo = (-di).max(0) as usize;
                let i_hi = ((h as isize - di).min(h as isize)).max(0) as usize;
                let j_lo = (-dj).max(0) as usize;
                let j_hi = ((w as isize - dj).min(w as isize)).max(0) as usize;
                if j_lo >= j_hi {
                    continue;
                }
                for bi in 0..b {
                    let x_base = (bi * c + ci) * hw;
                    let out_base = col_base + bi * hw;
                    for i in i_lo..i_hi {
                        let si = (i as isize + di) as usize;
                        let src = x_base + si * w;
                        let dst = out_base + i * w;
                        let src_j = (j_lo as isize + dj) as usize;
                        col[dst + j_lo..dst + j_hi]
                            .copy_from_slice(&xd[src + src_j..src + src_j + (j_hi - j_lo)]);
                    }
                }
            }
        }
    }
    col
}

pub fn shape4(x: &Tensor) -> (usize, usize, usize, usize) {
    let s = x.shape();
    assert_eq!(s.len(), 4, "expected a 4-d tensor, got {s:?}");
    (s[0], s[1], s[2], s[3])
}

/// Same-padding stride-1 convolution: x [B,C,H,W] * w [F,C,kh,kw] -> [B,F,H,W].
pub fn conv2d(x: &Tensor, w: &Tensor) -> Tensor {
    let (b, c, h, wd) = shape4(x);
    let (f, cw, kh, kw) = shape4(w);
    assert_eq!(c, cw, "conv2d channel mismatch: input {c}, kernel {cw}");
    assert!(kh % 2 == 1 && kw % 2 == 1, "conv2d requires odd kernels");
    let hw = h * wd;
    let bhw = b * hw;
    let col = im2col(x, kh, kw);
    let ckk = c * kh * kw;
    let mut out_mat = vec![0.0; f * bhw];
    gemm(f, ckk, bhw, w.data(), &col, &mut out_mat);
    // [F, B*HW] -> [B, F, H, W]
    let mut y = vec![0.0; b * f * hw];
    for fi in 0..f {
        for bi in 0..b {
            let src = fi * bhw + bi * hw;
            let dst = (bi * f + fi) * hw;
            y[dst..dst + hw].copy_from_slice(&out_mat[src..src + hw]);
        }
    }
    Tensor::from_vec(&[b, f, h, wd], y)
}

/// Weight gradient of [`conv2d`]: accumulates over batch and positions.
pub fn conv2d_dweight(x: &Tensor, gy: &Tensor, kh: usize, kw: usize) -> Tensor {
    let (b, c, h, w) = shape4(x);
    let (bg, f, hg, wg) = shape4(gy);
    assert_eq!((b, h, w), (bg, hg, wg), "conv2d_dweight shape mismatch");
    let hw = h * w;
    let bhw = b * hw;
    let col = im2col(x, kh, kw);
    let ckk = c * kh * kw;
    // gy [B,F,H,W] -> [F, B*HW]
    let mut gy_mat = vec![0.0; f * bhw];
    let gd = gy.data();
    for bi in 0..b {
        for fi in 0..f {
            let src = (bi * f + fi) * hw;
            let dst = fi * bhw + bi * hw;
            gy_mat[dst..dst + hw].copy_from_slice(&gd[src..src + hw]);
        }
    }
    let mut gw = vec![0.0; f * ckk];
    // gw [F, Ckk] = gy_mat [F, BHW] x col^T [BHW, Ckk]
    gemm_nt(f, bhw, ckk, &gy_mat, &col, &mut gw);
    Tensor::from_vec(&[f, c, kh, kw], gw)
}

/// Kernel adjoint: w [F,C,kh,kw] -> flipped, channel-transposed [C,F,kh,kw].
pub fn flip_transpose_kernel(w: &Tensor) -> Tensor {
    let (f, c, kh, kw) = shape4(w);
    let wd = w.data();
    let mut out = vec![0.0; wd.len()];
    for fi in 0..f {
        for ci in 0..c {
            for u in 0..kh {
                for v in 0..kw {
                    let src = ((fi * c + ci) * kh + u) * kw + v;
                    let dst = ((ci * f + fi) * kh + (kh - 1 - u)) * kw + (kw - 1 - v);
                    out[dst] = wd[src];
                }
            }
        }
    }
    Tensor::from_vec(&[c, f, kh, kw], out)
}

/// 2x2 average pooling; requires even spatial dims.
pub fn avg_pool2(x: &Tensor) -> Tensor {
    let (b, c, h, w) = shape4(x);
    assert!(h % 2 == 0 && w % 2 == 0, "avg_pool2 requires even dims, got {h}x{w}");
    let (ho, wo) = (h / 2, w / 2);
    let xd = x.data();
    let mut out = vec![0.0; b * c * ho * wo];
    for bc in 0..b * c {
        let src = bc * h * w;
        let dst = bc * ho * wo;
        for i in 0..ho {
            for j in 0..wo {
                let s = src + 2 * i * w + 2 * j;
                out[dst + i * wo + j] = 0.25 * (xd[s] + xd[s + 1] + xd[s + w] + xd[s + w + 1]);
            }
        }
    }
    Tensor::from_vec(&[b, c, ho, wo], out)
}

/// 2x nearest-neighbor upsampling.
pub fn upsample2(x: &Tensor) -> Tensor {
    let (b, c, h, w) = shape4(x);
    let (ho, wo) = (h * 2, w * 2);
    let xd = x.data();
    let mut out = vec![0.0; b * c * ho * wo];
    for bc in 0..b * c {
        let src = bc * h * w;
        let dst = bc * ho * wo;
        for i in 0..h {
            for j in 0..w {
                let v = xd[src + i * w + j];
                let d = dst + 2 * i * wo + 2 * j;
                out[d] = v;
                out[d + 1] = v;
                out[d + wo] = v;
                out[d + wo + 1] = v;
            }
        }
    }
    Tensor::from_vec(&[b, c, ho, wo], out)
}

/// x [B,I] x w [O,I]^T -> [B,O].
pub fn linear(x: &Tensor, w: &Tensor) -> Tensor {
    let (b, i) = {
        let s = x.shape();
        assert_eq!(s.len(), 2, "linear input must be 2-d");
        (s[0], s[1])
    };
    let (o, iw) = {
        let s = w.shape();
        assert_eq!(s.len(), 2, "linear weight must be 2-d");
        (s[0], s[1])
    };
    assert_eq!(i, iw, "linear shape mismatch: input {i}, weight {iw}");
    let mut y = vec![0.0; b * o];
    gemm_nt(b, i, o, x.data(), w.data(), &mut y);
    Tensor::from_vec(&[b, o], y)
}

pub fn transpose2(w: &Tensor) -> Tensor {
    let s = w.shape();
    assert_eq!(s.len(), 2);
    let (r, c) = (s[0], s[1]);
    let wd = w.data();
    let mut out = vec![0.0; wd.len()];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = wd[i * c + j];
        }
    }
    Tensor::from_vec(&[c, r], out)
}
