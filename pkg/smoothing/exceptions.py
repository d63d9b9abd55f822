class MeshError(Exception):
    pass


class InvalidMeshError(MeshError):
    pass


class OrientationError(MeshError):
    def __init__(self, element_ids, message=None):
        self.element_ids = list(element_ids)
        shown = ", ".join(str(i) for i in self.element_ids[:10])
        if len(self.element_ids) > 10:
            shown += ", ..."
        super().__init__(message or f"{len(self.element_ids)} element(s) with invalid orientation: [{shown}]")


class UnsupportedElementError(MeshError):
    pass


class ElementMatrixError(MeshError):
    pass


class DimensionError(MeshError):
    pass


class VectorLengthError(MeshError):
    pass


class MeshFormatError(MeshError):
    pass
