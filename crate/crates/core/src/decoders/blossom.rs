//! Maximum-weight matching on general graphs (Edmonds' blossom algorithm
//! with dual variables, O(n^3)), after Joris van Rantwijk's reference
//! implementation. Integer weights keep every comparison exact.

const NONE: usize = usize::MAX;

struct State<'a> {
    n: usize,
    edges: &'a [(usize, usize, i64)],
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

/// Python-style index into a cycle.
fn wrap(j: isize, len: usize) -> usize {
    j.rem_euclid(len as isize) as usize
}

impl<'a> State<'a> {
    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.n {
                out.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().rev());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            let mb = self.mate[base];
            debug_assert!(mb != NONE);
            self.assign_label(self.endpoint[mb], 1, mb ^ 1);
        }
    }

    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for v in self.leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                None => self.leaves(bv).into_iter().map(|v| self.neighbend[v].iter().map(|p| p / 2).collect()).collect(),
                Some(list) => vec![list],
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for &k in &list {
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
        self.blossombestedges[b] = Some(list);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len();
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, isize) = if j & 1 != 0 {
                j -= len as isize;
                (1, 0)
            } else {
                (-1, 1)
            };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                let ep = endps[wrap(j - endptrick, len)];
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint[ep ^ endptrick as usize ^ 1]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[ep / 2] = true;
                j += jstep;
                p = endps[wrap(j - endptrick, len)] ^ endptrick as usize;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[wrap(j, len)];
            let ep1 = self.endpoint[p ^ 1];
            self.label[ep1] = 2;
            self.label[bv] = 2;
            self.labelend[ep1] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[wrap(j, len)] != entrychild {
                let bv = childs[wrap(j, len)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                if let Some(v) = self.leaves(bv).into_iter().find(|&v| self.label[v] != 0) {
                    self.label[v] = 0;
                    let m = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[m]] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = u8::MAX;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len();
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, isize) = if i & 1 != 0 {
            j -= len as isize;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            let p = self.blossomendps[b][wrap(j - endptrick, len)] ^ endptrick as usize;
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }
}

/// Maximum-weight matching. With `max_cardinality` the matching is first of
/// maximum size, then of maximum weight among those. Returns each vertex's
/// partner.
pub fn max_weight_matching(n: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> Vec<Option<usize>> {
    if edges.is_empty() || n == 0 {
        return vec![None; n];
    }
    let nedge = edges.len();
    let maxweight = edges.iter().map(|e| e.2).max().unwrap().max(0);
    let mut neighbend = vec![Vec::new(); n];
    let mut endpoint = Vec::with_capacity(2 * nedge);
    for (k, &(i, j, _)) in edges.iter().enumerate() {
        endpoint.push(i);
        endpoint.push(j);
        neighbend[i].push(2 * k + 1);
        neighbend[j].push(2 * k);
    }
    let mut st = State {
        n,
        edges,
        endpoint,
        neighbend,
        mate: vec![NONE; n],
        label: vec![0; 2 * n],
        labelend: vec![NONE; 2 * n],
        inblossom: (0..n).collect(),
        blossomparent: vec![NONE; 2 * n],
        blossomchilds: vec![Vec::new(); 2 * n],
        blossombase: (0..n).chain(std::iter::repeat(NONE).take(n)).collect(),
        blossomendps: vec![Vec::new(); 2 * n],
        bestedge: vec![NONE; 2 * n],
        blossombestedges: vec![None; 2 * n],
        unusedblossoms: (n..2 * n).collect(),
        dualvar: std::iter::repeat(maxweight).take(n).chain(std::iter::repeat(0).take(n)).collect(),
        allowedge: vec![false; nedge],
        queue: Vec::new(),
    };

    for _ in 0..n {
        st.label.iter_mut().for_each(|x| *x = 0);
        st.bestedge.iter_mut().for_each(|x| *x = NONE);
        for b in n..2 * n {
            st.blossombestedges[b] = None;
        }
        st.allowedge.iter_mut().for_each(|x| *x = false);
        st.queue.clear();
        for v in 0..n {
            if st.mate[v] == NONE && st.label[st.inblossom[v]] == 0 {
                st.assign_label(v, 1, NONE);
            }
        }
        let mut augmented = false;
        loop {
            while let Some(v) = (!augmented).then(|| st.queue.pop()).flatten() {
                for idx in 0..st.neighbend[v].len() {
                    let p = st.neighbend[v][idx];
                    let k = p / 2;
                    let w = st.endpoint[p];
                    if st.inblossom[v] == st.inblossom[w] {
                        continue;
                    }
                    let mut kslack = 0;
                    if !st.allowedge[k] {
                        kslack = st.slack(k);
                        if kslack <= 0 {
                            st.allowedge[k] = true;
                        }
                    }
                    if st.allowedge[k] {
                        if st.label[st.inblossom[w]] == 0 {
                            st.assign_label(w, 2, p ^ 1);
                        } else if st.label[st.inblossom[w]] == 1 {
                            let base = st.scan_blossom(v, w);
                            if base != NONE {
                                st.add_blossom(base, k);
                            } else {
                                st.augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if st.label[w] == 0 {
                            st.label[w] = 2;
                            st.labelend[w] = p ^ 1;
                        }
                    } else if st.label[st.inblossom[w]] == 1 {
                        let b = st.inblossom[v];
                        if st.bestedge[b] == NONE || kslack < st.slack(st.bestedge[b]) {
                            st.bestedge[b] = k;
                        }
                    } else if st.label[w] == 0 && (st.bestedge[w] == NONE || kslack < st.slack(st.bestedge[w])) {
                        st.bestedge[w] = k;
                    }
                }
            }
            if augmented {
                break;
            }

            // dual adjustment
            let mut deltatype = 0u8;
            let mut delta = 0i64;
            let mut deltaedge = NONE;
            let mut deltablossom = NONE;
            if !max_cardinality {
                deltatype = 1;
                delta = st.dualvar[..n].iter().copied().min().unwrap();
            }
            for v in 0..n {
                if st.label[st.inblossom[v]] == 0 && st.bestedge[v] != NONE {
                    let d = st.slack(st.bestedge[v]);
                    if deltatype == 0 || d < delta {
                        delta = d;
                        deltatype = 2;
                        deltaedge = st.bestedge[v];
                    }
                }
            }
            for b in 0..2 * n {
                if st.blossomparent[b] == NONE && st.label[b] == 1 && st.bestedge[b] != NONE {
                    let kslack = st.slack(st.bestedge[b]);
                    debug_assert!(kslack % 2 == 0);
                    let d = kslack / 2;
                    if deltatype == 0 || d < delta {
                        delta = d;
                        deltatype = 3;
                        deltaedge = st.bestedge[b];
                    }
                }
            }
            for b in n..2 * n {
                if st.blossombase[b] != NONE
                    && st.blossomparent[b] == NONE
                    && st.label[b] == 2
                    && (deltatype == 0 || st.dualvar[b] < delta)
                {
                    delta = st.dualvar[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if deltatype == 0 {
                deltatype = 1;
                delta = st.dualvar[..n].iter().copied().min().unwrap().max(0);
            }
            for v in 0..n {
                match st.label[st.inblossom[v]] {
                    1 => st.dualvar[v] -= delta,
                    2 => st.dualvar[v] += delta,
                    _ => {}
                }
            }
            for b in n..2 * n {
                if st.blossombase[b] != NONE && st.blossomparent[b] == NONE {
                    match st.label[b] {
                        1 => st.dualvar[b] += delta,
                        2 => st.dualvar[b] -= delta,
                        _ => {}
                    }
                }
            }
            match deltatype {
                1 => break,
                2 => {
                    st.allowedge[deltaedge] = true;
                    let (mut i, j, _) = edges[deltaedge];
                    if st.label[st.inblossom[i]] == 0 {
                        i = j;
                    }
                    st.queue.push(i);
                }
                3 => {
                    st.allowedge[deltaedge] = true;
                    let (i, _, _) = edges[deltaedge];
                    st.queue.push(i);
                }
                _ => st.expand_blossom(deltablossom, false),
            }
        }
        if !augmented {
            break;
        }
        for b in n..2 * n {
            if st.blossomparent[b] == NONE && st.blossombase[b] != NONE && st.label[b] == 1 && st.dualvar[b] == 0 {
                st.expand_blossom(b, true);
            }
        }
    }
    st.mate.iter().map(|&m| (m != NONE).then(|| st.endpoint[m])).collect()
}
