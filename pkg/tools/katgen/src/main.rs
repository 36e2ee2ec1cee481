//! Writes NIST-style .rsp known-answer files for the SHAKE FrodoKEM
//! parameter sets, driving an independent FrodoKEM implementation with the
//! AES-256-CTR DRBG used by PQCgenKAT_kem.
use aes::cipher::{BlockEncrypt, KeyInit};
use aes::Aes256;
use frodo_kem_rs::Algorithm;
use std::fmt::Write as _;

struct Drbg {
    key: [u8; 32],
    v: [u8; 16],
}

impl Drbg {
    fn new(entropy: &[u8; 48]) -> Self {
        let mut d = Drbg { key: [0; 32], v: [0; 16] };
        d.update(Some(entropy));
        d
    }

    fn incr_v(&mut self) {
        for j in (0..16).rev() {
            if self.v[j] == 0xff {
                self.v[j] = 0;
            } else {
                self.v[j] += 1;
                break;
            }
        }
    }

    fn block(&self) -> [u8; 16] {
        let c = Aes256::new_from_slice(&self.key).unwrap();
        let mut b = aes::Block::clone_from_slice(&self.v);
        c.encrypt_block(&mut b);
        b.into()
    }

    fn update(&mut self, provided: Option<&[u8; 48]>) {
        let mut temp = [0u8; 48];
        for i in 0..3 {
            self.incr_v();
            temp[16 * i..16 * i + 16].copy_from_slice(&self.block());
        }
        if let Some(p) = provided {
            for i in 0..48 {
                temp[i] ^= p[i];
            }
        }
        self.key.copy_from_slice(&temp[..32]);
        self.v.copy_from_slice(&temp[32..]);
    }

    fn bytes(&mut self, out: &mut [u8]) {
        let mut off = 0;
        while off < out.len() {
            self.incr_v();
            let b = self.block();
            let n = (out.len() - off).min(16);
            out[off..off + n].copy_from_slice(&b[..n]);
            off += n;
        }
        self.update(None);
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let count: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(100);
    let (alg, name) = match args.get(1).map(String::as_str) {
        Some("640") => (Algorithm::FrodoKem640Shake, "FrodoKEM-640-SHAKE"),
        Some("976") => (Algorithm::FrodoKem976Shake, "FrodoKEM-976-SHAKE"),
        Some("1344") => (Algorithm::FrodoKem1344Shake, "FrodoKEM-1344-SHAKE"),
        _ => panic!("usage: katgen {{640|976|1344}} [count]"),
    };
    let p = alg.params();
    let mut entropy = [0u8; 48];
    for (i, e) in entropy.iter_mut().enumerate() {
        *e = i as u8;
    }
    let mut outer = Drbg::new(&entropy);
    let mut out = String::new();
    writeln!(out, "# {}\n", name).unwrap();
    for c in 0..count {
        let mut seed = [0u8; 48];
        outer.bytes(&mut seed);
        let mut rng = Drbg::new(&seed);
        let mut kseed = vec![0u8; p.key_seed_length];
        rng.bytes(&mut kseed);
        let (pk, sk) = alg.generate_keypair_from_seed(&kseed).unwrap();
        let mut mu_salt = vec![0u8; p.message_length + p.salt_length];
        rng.bytes(&mut mu_salt);
        let (ct, ss) = alg
            .encapsulate(&pk, &mu_salt[..p.message_length], &mu_salt[p.message_length..])
            .unwrap();
        let (ss2, _) = alg.decapsulate(&sk, &ct).unwrap();
        assert_eq!(ss.value(), ss2.value());
        writeln!(out, "count = {}", c).unwrap();
        writeln!(out, "seed = {}", hex::encode_upper(seed)).unwrap();
        writeln!(out, "pk = {}", hex::encode_upper(pk.value())).unwrap();
        writeln!(out, "sk = {}", hex::encode_upper(sk.value())).unwrap();
        writeln!(out, "ct = {}", hex::encode_upper(ct.value())).unwrap();
        writeln!(out, "ss = {}\n", hex::encode_upper(ss.value())).unwrap();
    }
    print!("{}", out);
}
