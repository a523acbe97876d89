//! Carry-less 64x64 -> 128 multiplication.
//!
//! Uses the PCLMULQDQ instruction when the CPU has it, otherwise a
//! shift-and-xor loop over the set bits of the shorter operand.

#[cfg(target_arch = "x86_64")]
mod hw {
    use std::sync::OnceLock;

    static HAS_PCLMUL: OnceLock<bool> = OnceLock::new();

    #[inline]
    pub fn available() -> bool {
        *HAS_PCLMUL.get_or_init(|| std::arch::is_x86_feature_detected!("pclmulqdq"))
    }

    #[target_feature(enable = "pclmulqdq", enable = "sse2")]
    pub unsafe fn clmul(a: u64, b: u64) -> u128 {
        use std::arch::x86_64::*;
        let va = _mm_set_epi64x(0, a as i64);
        let vb = _mm_set_epi64x(0, b as i64);
        let prod = _mm_clmulepi64_si128::<0>(va, vb);
        let lo = _mm_cvtsi128_si64(prod) as u64;
        let hi = _mm_extract_epi64::<1>(prod) as u64;
        ((hi as u128) << 64) | lo as u128
    }
}

#[inline]
fn clmul_soft(a: u64, b: u64) -> u128 {
    // Iterate over the operand with fewer set bits.
    let (mut scan, base) = if a.count_ones() <= b.count_ones() {
        (a, b as u128)
    } else {
        (b, a as u128)
    };
    let mut acc = 0u128;
    while scan != 0 {
        let i = scan.trailing_zeros();
        acc ^= base << i;
        scan &= scan - 1;
    }
    acc
}

/// Carry-less product of two binary polynomials of degree < 64.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if hw::available() {
            // Safety: guarded by the runtime feature check above.
            return unsafe { hw::clmul(a, b) };
        }
    }
    clmul_soft(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clmul_ref(a: u64, b: u64) -> u128 {
        let mut acc = 0u128;
        for i in 0..64 {
            if (b >> i) & 1 == 1 {
                acc ^= (a as u128) << i;
            }
        }
        acc
    }

    #[test]
    fn matches_reference() {
        let cases = [
            (0u64, 0u64),
            (1, 1),
            (0b101, 0b11),
            (u64::MAX, u64::MAX),
            (0x8000_0000_0000_0001, 0xffff_0000_0000_ffff),
            (0xdead_beef_cafe_f00d, 0x0123_4567_89ab_cdef),
        ];
        for (a, b) in cases {
            assert_eq!(clmul64(a, b), clmul_ref(a, b), "a={a:#x} b={b:#x}");
            assert_eq!(clmul_soft(a, b), clmul_ref(a, b));
        }
    }

    #[test]
    fn commutes() {
        let mut x = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            x = x.wrapping_mul(0x2545f4914f6cdd1d).rotate_left(17);
            let y = x.wrapping_mul(0xda942042e4dd58b5);
            assert_eq!(clmul64(x, y), clmul64(y, x));
        }
    }
}
