# justinf: exact computations for just-infinite algebras
