"""Export torchvision's ImageNet ResNet-18 weights in the format texshuffle loads.

The C++ loader reads a plain dict of tensors, so the OrderedDict returned by
state_dict() is converted before saving.

    python tools/export_resnet18_weights.py resnet18_imagenet.pt
"""

import argparse

import torch
import torchvision


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("output", help="destination .pt file")
    args = parser.parse_args()

    model = torchvision.models.resnet18(weights=torchvision.models.ResNet18_Weights.IMAGENET1K_V1)
    torch.save(dict(model.state_dict()), args.output)
    print(f"wrote {len(model.state_dict())} tensors to {args.output}")


if __name__ == "__main__":
    main()
