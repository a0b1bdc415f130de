//! Embedded covering arrays found by offline search (tools/ca_anneal and
//! tools/ca_search.py); every array is re-verified exhaustively at
//! construction time.  Rows are digit strings separated by '|'.  `lookup`
//! returns the smallest stored array whose parameters dominate the request
//! (column prefixes of a covering array are covering arrays).
//!
//! Sizes vs the smallest known values: all entries are optimal except
//! (2, 20, 3) at N = 17 (best known 15, slack +2).  (3, 11, 2) is the
//! Paley-Hadamard H12 construction; the rest come from simulated
//! annealing.

use super::CoveringArray;

/// (t, k, v, N, rows)
static EMBEDDED: &[(usize, usize, usize, usize, &str)] = &[
    (2, 5, 3, 11, "01001|12101|20211|00200|02222|12010|10021|11212|21120|00112|22002"),
    (2, 7, 3, 12, "2201201|0002100|0220220|2121110|1212020|0101022|2022012|0112211|1011202|1120001|2010121|1200112"),
    (2, 9, 3, 13, "002220020|122002021|002101101|011202122|211011000|020211221|212200211|220020102|002012212|110121012|101222201|200102220|121110110"),
    (2, 10, 3, 14, "2100222202|2010000020|2222012001|1022101201|0101200012|0202102120|0220110211|1121121000|0112220101|0002021112|1011212210|1220221122|1101010221|2211111112"),
    (2, 20, 3, 17, "00112121221000202112|01222022012121222220|21012012211002110120|21100000112021101202|12000122121120010211|21221122001201211002|02001101102112102020|02212201120200211101|02110210202220020021|10100010222102212100|10022110100222021202|22121011001021021111|21201101212200022210|12011200011111210222|11202220020012122011|10220011010210100001|20121202220111001120"),
    (3, 5, 2, 10, "00101|01111|11010|01001|11101|10000|10110|00010|10011|01100"),
    (3, 11, 2, 12, "00000000000|10100011101|11010001110|01101000111|10110100011|11011010001|11101101000|01110110100|00111011010|00011101101|10001110110|01000111011"),
    (3, 12, 2, 15, "000000001000|101100010001|011110011110|100001010110|011001111101|001101101111|011101100010|111001001011|110010110000|100111111000|110100101111|010111000101|101011001011|000010110011|101010100100"),
    (3, 13, 2, 16, "0001110001111|1100011011010|0110011100111|1010101001101|1111000111111|1100111111001|1000110110100|0010001011110|1001101100010|0100000101000|0101001010101|0010100010011|1001010100001|1111010000000|0011111111000|0111100000110"),
    (3, 14, 2, 16, "10010111111110|10001011000001|11111100100111|00000000100000|10010000011011|01000101001111|01011110111001|01110011100011|01111001011010|11110010001100|11100110010010|00101010111111|11001001110100|00110101010101|00011110000110|10101101101000"),
];

pub(super) fn lookup(t: usize, k: usize, v: usize) -> Option<CoveringArray> {
    EMBEDDED
        .iter()
        .filter(|&&(et, ek, ev, _, _)| et == t && ev == v && ek >= k)
        .min_by_key(|&&(_, ek, _, en, _)| (en, ek))
        .map(|&(et, ek, ev, en, rows)| {
            let rows: Vec<Vec<u8>> = rows
                .split('|')
                .map(|r| r.bytes().map(|b| b - b'0').collect())
                .collect();
            debug_assert_eq!(rows.len(), en);
            debug_assert!(rows.iter().all(|r| r.len() == ek));
            CoveringArray { t: et, k: ek, v: ev, rows }
        })
}
