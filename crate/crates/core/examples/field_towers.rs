//! Extension towers over F_2, F_3 and F_4: embeddings of the primitive
//! element, Frobenius-fixed subfields, relative traces.

use bertini_lab::make_field;

fn main() -> bertini_lab::Result<()> {
    for (p, s) in [(2, 1), (3, 1), (2, 2)] {
        let k = make_field(p, s)?;
        for r in [2, 3, 4] {
            let ext = k.extension(r)?;
            let emb = k.embedding_into(&ext)?;
            let w = k.omega();
            let image = emb.apply(w);
            let fixed = ext.elements().filter(|&a| (0..k.s()).fold(a, |x, _| ext.frobenius(x)) == a).count();
            println!(
                "{k} -> {ext}: omega {} maps to {}, {} elements fixed by the q-power map, Tr(omega) = {}",
                k.elem(w),
                ext.elem(image),
                fixed,
                k.elem(ext.relative_trace(ext.omega(), &k)?)
            );
        }
    }
    Ok(())
}
