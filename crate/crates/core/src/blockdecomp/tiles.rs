//! Tiles 𝒯 = I×J of block indices, the usefulness test, and the homogeneous tile maps P_{𝒯,t}.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{reduced_product, BlockDecomposition};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::polycore::{Multiindex, Poly, PolyMatrix};
use crate::scalar::Rat;

/// Row-group interval [i_L, i_R] times column-group interval [j_L, j_R].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl Tile {
    pub fn new(rows: (usize, usize), cols: (usize, usize)) -> Self {
        Tile { rows, cols }
    }

    pub fn full(dec: &BlockDecomposition) -> Self {
        Tile { rows: (0, dec.m_star()), cols: (0, dec.m()) }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.rows.0..=self.rows.1).contains(&i) && (self.cols.0..=self.cols.1).contains(&j)
    }

    pub fn is_valid(&self, dec: &BlockDecomposition) -> bool {
        self.rows.0 <= self.rows.1 && self.rows.1 <= dec.m_star() && self.cols.0 <= self.cols.1 && self.cols.1 <= dec.m()
    }

    /// p_I = Σ_{i∈I} p_i.
    pub fn p_of(&self, dec: &BlockDecomposition) -> usize {
        dec.row_groups[self.rows.0..=self.rows.1].iter().sum()
    }

    /// q_J = Σ_{j∈J} q_j.
    pub fn q_of(&self, dec: &BlockDecomposition) -> usize {
        dec.col_groups[self.cols.0..=self.cols.1].iter().sum()
    }

    fn row_span(&self, dec: &BlockDecomposition) -> std::ops::Range<usize> {
        dec.row_range(self.rows.0).start..dec.row_range(self.rows.1).end
    }

    fn col_span(&self, dec: &BlockDecomposition) -> std::ops::Range<usize> {
        dec.col_range(self.cols.0).start..dec.col_range(self.cols.1).end
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.rows.0, self.rows.1, self.cols.0, self.cols.1)
    }
}

/// All I×J whose enlargement 𝒯⁺ = [i_L, min(i_R+1, m*)]×[j_L, min(j_R+1, m)] adds only cells
/// whose degree strictly exceeds that of each in-tile neighbour above or to the left.
pub fn useful_tiles(dec: &BlockDecomposition) -> Vec<Tile> {
    let (ms, m) = (dec.m_star(), dec.m());
    let dd = &dec.degrees;
    let mut out = Vec::new();
    for il in 0..=ms {
        for ir in il..=ms {
            for jl in 0..=m {
                for jr in jl..=m {
                    let t = Tile::new((il, ir), (jl, jr));
                    let useful = (il..=(ir + 1).min(ms)).all(|i| {
                        (jl..=(jr + 1).min(m)).all(|j| {
                            if t.contains(i, j) {
                                return true;
                            }
                            let above = i > 0 && t.contains(i - 1, j) && dd[i][j] <= dd[i - 1][j];
                            let left = j > 0 && t.contains(i, j - 1) && dd[i][j] <= dd[i][j - 1];
                            !above && !left
                        })
                    });
                    if useful {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

/// Caches R(s, z) so that many tiles and base points can be extracted cheaply.
#[derive(Clone, Debug)]
pub struct TileMapper {
    pub dec: BlockDecomposition,
    pub r: PolyMatrix<Rat>,
}

impl TileMapper {
    pub fn new(m: &PolyMatrix<Rat>, dec: &BlockDecomposition) -> Result<Self> {
        if dec.p() != m.p() || dec.q() != m.q() {
            return Err(Error::Shape(format!("decomposition is {}x{}, matrix is {}x{}", dec.p(), dec.q(), m.p(), m.q())));
        }
        Ok(TileMapper { dec: dec.clone(), r: reduced_product(m, &dec.a, &dec.b)? })
    }

    pub fn d(&self) -> usize {
        self.dec.d()
    }

    /// The tile's degree-D_ij z-parts with the base point left symbolic: variables (t, z).
    pub fn symbolic(&self, tile: &Tile) -> Result<PolyMatrix<Rat>> {
        if !tile.is_valid(&self.dec) {
            return Err(Error::Shape(format!("tile {tile} outside the {}x{} block grid", self.dec.m_star() + 1, self.dec.m() + 1)));
        }
        let d = self.d();
        let (rs, cs) = (tile.row_span(&self.dec), tile.col_span(&self.dec));
        Ok(PolyMatrix::from_fn(rs.len(), cs.len(), 2 * d, |a, b| {
            let (ga, gb) = (rs.start + a, cs.start + b);
            let deg = self.dec.degrees[self.dec.row_group_of(ga)][self.dec.col_group_of(gb)];
            self.r.get(ga, gb).filter_terms(|al| al.entries()[d..].iter().sum::<u32>() == deg)
        }))
    }

    /// P_{𝒯,t₀}(z), exact.
    pub fn at(&self, tile: &Tile, t0: &[Rat]) -> Result<PolyMatrix<Rat>> {
        let d = self.d();
        if t0.len() != d {
            return Err(Error::Dimension(format!("base point has {} coordinates, expected {d}", t0.len())));
        }
        Ok(specialize(&self.symbolic(tile)?, t0))
    }
}

/// Evaluates the first d variables of a (t, z) polynomial matrix at t₀.
pub(crate) fn specialize(sym: &PolyMatrix<Rat>, t0: &[Rat]) -> PolyMatrix<Rat> {
    let d = t0.len();
    PolyMatrix::from_fn(sym.p(), sym.q(), d, |i, j| {
        let terms = sym.get(i, j).split_vars(d).into_iter().map(|(beta, c)| (beta, c.eval_exact(t0)));
        Poly::from_terms(d, terms)
    })
}

/// P_{𝒯,t₀} for a tile of the decomposition.
pub fn tile_map(m: &PolyMatrix<Rat>, dec: &BlockDecomposition, tile: &Tile, t0: &[Rat]) -> Result<PolyMatrix<Rat>> {
    TileMapper::new(m, dec)?.at(tile, t0)
}

/// Row-invariance certificate for a symbolic tile P(t, z): a polynomial A(t) with
/// P(t, z) = A(t)·P(0, z) exactly and det A(t) ≡ ±1, so that |||P_{𝒯,t}|||_σ does not depend on t.
pub fn invariance_certificate(sym: &PolyMatrix<Rat>) -> Option<PolyMatrix<Rat>> {
    let d = sym.d() / 2;
    let (p, q) = (sym.p(), sym.q());
    let split: Vec<Vec<_>> = (0..p).map(|i| (0..q).map(|j| sym.get(i, j).split_vars(d)).collect()).collect();
    let mut keys: BTreeSet<(usize, Multiindex)> = BTreeSet::new();
    for row in &split {
        for (j, parts) in row.iter().enumerate() {
            keys.extend(parts.keys().map(|b| (j, b.clone())));
        }
    }
    let keys: Vec<(usize, Multiindex)> = keys.into_iter().collect();
    let ct = |i: usize, k: usize| split[i][keys[k].0].get(&keys[k].1).cloned().unwrap_or_else(|| Poly::zero(d));
    let origin = vec![Rat::zero(); d];
    let c0 = Mat::from_fn(p, keys.len(), |i, k| ct(i, k).eval_exact(&origin));
    let rr = c0.rref();
    if rr.pivots.len() != p {
        return None;
    }
    let inv = c0.select_cols(&rr.pivots).inverse()?;
    let a = PolyMatrix::from_fn(p, p, d, |i, l| {
        rr.pivots.iter().enumerate().fold(Poly::zero(d), |acc, (k, &col)| &acc + &ct(i, col).scale(&inv[(k, l)]))
    });
    for i in 0..p {
        for k in 0..keys.len() {
            let lhs = (0..p).fold(Poly::zero(d), |acc, l| &acc + &a.get(i, l).scale(&c0[(l, k)]));
            if lhs != ct(i, k) {
                return None;
            }
        }
    }
    let det = a.det().ok()?;
    (det.is_constant() && det.constant_term().abs().is_one()).then_some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockdecomp::fixtures::*;
    use crate::blockdecomp::{decompose, reflect_z};
    use crate::scalar::{rat, rat_int};

    fn concrete() -> (PolyMatrix<Rat>, BlockDecomposition) {
        let m = concrete_m();
        let (dec, _, _) = decompose(&m).unwrap();
        (m, dec)
    }

    #[test]
    fn concrete_useful_tiles() {
        let (_, dec) = concrete();
        let tiles = useful_tiles(&dec);
        for t in [Tile::new((0, 1), (0, 0)), Tile::new((0, 1), (1, 1)), Tile::new((0, 0), (2, 2)), Tile::new((1, 1), (2, 2))] {
            assert!(tiles.contains(&t), "{t}");
        }
        assert!(tiles.contains(&Tile::full(&dec)));
    }

    #[test]
    fn single_group_only_full_tile() {
        let dec = BlockDecomposition::new(vec![2], vec![3], vec![vec![0]], PolyMatrix::identity(2, 1), PolyMatrix::identity(3, 1)).unwrap();
        assert_eq!(useful_tiles(&dec), vec![Tile::full(&dec)]);
    }

    #[test]
    fn intro_has_first_column_tile() {
        let tiles = useful_tiles(&intro_decomposition());
        assert!(tiles.contains(&Tile::new((0, 1), (0, 0))));
    }

    #[test]
    fn concrete_tile_maps() {
        let (m, dec) = concrete();
        let mapper = TileMapper::new(&m, &dec).unwrap();
        let t0 = vec![rat(2, 3), rat(-5, 1)];
        let z = |k: usize| Poly::<Rat>::var(2, k);
        let p2 = mapper.at(&Tile::new((0, 0), (2, 2)), &t0).unwrap();
        assert_eq!(p2, PolyMatrix::from_rows(2, vec![vec![z(0).pow(2)], vec![z(1).pow(2)]]).unwrap());
        let p0 = mapper.at(&Tile::new((0, 1), (0, 0)), &t0).unwrap();
        let mut expect = PolyMatrix::<Rat>::identity(4, 2);
        expect.set(2, 0, Poly::constant(2, rat_int(-2)));
        expect.set(3, 1, Poly::constant(2, rat_int(15)));
        assert_eq!(p0, expect);
        // the displayed −2z³ column is written with z = s − t
        let p3 = mapper.at(&Tile::new((1, 1), (2, 2)), &t0).unwrap();
        let shown = PolyMatrix::from_rows(2, vec![vec![z(0).pow(3).scale(&rat_int(-2))], vec![z(1).pow(3).scale(&rat_int(-2))]]).unwrap();
        assert_eq!(reflect_z(&p3, 0), shown);
    }

    #[test]
    fn concrete_tiles_are_row_invariant() {
        let (m, dec) = concrete();
        let mapper = TileMapper::new(&m, &dec).unwrap();
        for t in [Tile::new((0, 1), (0, 0)), Tile::new((0, 1), (1, 1)), Tile::new((0, 0), (2, 2)), Tile::new((1, 1), (2, 2))] {
            let sym = mapper.symbolic(&t).unwrap();
            let a = invariance_certificate(&sym).unwrap_or_else(|| panic!("{t}"));
            assert_eq!(a.p(), t.p_of(&dec));
        }
    }

    #[test]
    fn non_invariant_tile_has_no_certificate() {
        // P(t, z) = [t z]: the t-dependence is a scaling, not unimodular
        let sym = PolyMatrix::from_rows(2, vec![vec![&Poly::<Rat>::var(2, 0) * &Poly::var(2, 1)]]).unwrap();
        assert!(invariance_certificate(&sym).is_none());
        let sym = PolyMatrix::from_rows(2, vec![vec![&(&Poly::<Rat>::var(2, 0) + &Poly::one(2)) * &Poly::var(2, 1)]]).unwrap();
        assert!(invariance_certificate(&sym).is_none());
    }

    #[test]
    fn degenerate_full_tile_matches_display() {
        let m = degenerate_m();
        let el = crate::blockdecomp::eliminate(&m).unwrap();
        let lowest = |i: usize, j: usize| -> u32 {
            match m.get(i, j).order() {
                Some(o) => o,
                None => u32::from(j >= 5),
            }
        };
        let degrees: Vec<Vec<u32>> = (0..4).map(|i| (0..8).map(|j| lowest(i, j)).collect()).collect();
        let dec = BlockDecomposition::new(vec![1; 4], vec![1; 8], degrees, el.a.clone(), el.b.clone()).unwrap();
        let p = tile_map(&m, &dec, &Tile::full(&dec), &[rat_int(0), rat_int(0), rat_int(0)]).unwrap();
        let z = |k: usize| Poly::<Rat>::var(3, k);
        assert_eq!(p.get(0, 7), &-z(0));
        assert_eq!(p.get(2, 7), &(&(&z(1) * &z(2)) + &z(0).pow(2).scale(&rat(1, 2))));
        assert_eq!(p.get(1, 7), &(&z(0) * &z(1)));
        assert_eq!(p.get(1, 5), &-z(0));
        assert_eq!(p.get(3, 3), &Poly::one(3));
        assert_eq!(p.support_set().len(), 4 + 10 + 4);
    }

    #[test]
    fn dimension_mismatch() {
        let (m, dec) = concrete();
        assert!(matches!(tile_map(&m, &dec, &Tile::full(&dec), &[rat_int(0)]), Err(Error::Dimension(_))));
    }
}
