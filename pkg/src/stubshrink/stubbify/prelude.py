"""The per-package stub runtime, written in MiniMod itself.

``__fetch(kind, key)`` is the only interpreter hook it relies on: it reads
the code store and records an expansion event.
"""

PRELUDE_TEXT = """\
let stubs = {
  cache: {},
  getCode: function(id) {
    return __fetch("function", id);
  },
  getCodeForFile: function(path) {
    return __fetch("file", path);
  },
  getStub: function(id) {
    return this.cache[id];
  },
  setStub: function(id, code) {
    this.cache[id] = code;
  },
  cpFunProps: function(src, dst) {
    let ks = keys(src);
    let i = 0;
    while (i < len(ks)) {
      dst[ks[i]] = src[ks[i]];
      i = i + 1;
    }
  }
};
"""
