a = pkg.Toffoli(k=v)
b = foo.bar(2)
